use cross_sdp::cert_measure::{matrix_check_measure, slackness_check_measure, DualCertificateMeasure};
use cross_sdp::cert_uniform::{matrix_check_uniform, slackness_check_uniform, DualCertificateUniform};
use cross_sdp::exactnum::{pow, rat, Rational};
use cross_sdp::oracle::{max_product_measure, max_product_uniform, ConflictGraph};
use cross_sdp::Caps;
use num_traits::Signed;
use proptest::prelude::*;

#[test]
fn uniform_optimum_equals_alpha_squared() {
    for (n, k) in [(6, 3), (7, 3), (8, 3), (9, 3)] {
        let cert = DualCertificateUniform::construct(n, k).unwrap();
        let report = max_product_uniform(n, k, 2).unwrap();
        assert_eq!(report.optimum, &cert.alpha * &cert.alpha, "({n},{k})");
    }
}

#[test]
fn measure_optimum_equals_p_fourth() {
    for n in 2..=5 {
        for p in [rat(1, 10), rat(1, 5), rat(1, 4), rat(3, 10), rat(1, 3)] {
            let report = max_product_measure(n, &p, 2).unwrap();
            assert_eq!(report.optimum, pow(&p, 4), "n={n}, p={p}");
        }
    }
}

#[test]
fn measure_bound_unattained_below_two() {
    let report = max_product_measure(1, &rat(1, 4), 2).unwrap();
    assert!(report.optimum < pow(&rat(1, 4), 4));
}

#[test]
fn blocks_agree_with_assembled_matrix() {
    let caps = Caps::default();
    for (n, k) in [(6, 3), (7, 3), (8, 3)] {
        let cert = DualCertificateUniform::construct(n, k).unwrap();
        let r = matrix_check_uniform(&cert, caps.uniform).unwrap();
        assert!(r.psd && r.consistent(), "({n},{k}): {r:?}");
    }
    for p in [rat(1, 5), rat(1, 4), rat(1, 3)] {
        for n in 1..=6 {
            let cert = DualCertificateMeasure::construct(&p, n).unwrap();
            let r = matrix_check_measure(&cert, caps.measure).unwrap();
            assert!(r.psd && r.consistent(), "p={p}, n={n}: {r:?}");
        }
    }
}

#[test]
fn infeasible_eps1_rejected_at_matrix_level() {
    let caps = Caps::default();
    let cert = DualCertificateUniform::with_eps1(6, 3, rat(1, 6)).unwrap();
    assert!(!cert.feasible);
    let r = matrix_check_uniform(&cert, caps.uniform).unwrap();
    assert!(!r.psd && r.witness_valid && r.blocks_agree);
    assert!(r.witness_value.unwrap().is_negative());

    let cert = DualCertificateMeasure::with_eps1(&rat(1, 3), 4, rat(1, 100)).unwrap();
    assert!(!cert.feasible);
    let r = matrix_check_measure(&cert, caps.measure).unwrap();
    assert!(!r.psd && r.witness_valid && r.blocks_agree);
}

fn seed(graph: &ConflictGraph, picks: &[usize]) -> u128 {
    picks.iter().fold(0, |acc, &i| acc | 1u128 << (i % graph.len()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weak_duality_uniform(n in 6u32..=8, picks in prop::collection::vec(any::<usize>(), 1..4)) {
        let graph = ConflictGraph::uniform(n, 3, 2).unwrap();
        let f = seed(&graph, &picks);
        let g = graph.closure(f);
        prop_assume!(g != 0);
        let cert = DualCertificateUniform::construct(n, 3).unwrap();
        let s = slackness_check_uniform(&cert, &graph.masks(f), &graph.masks(g));
        prop_assert!(s.cross_intersecting);
        prop_assert!(s.product <= s.alpha_squared);
        prop_assert!(s.duality_gap_identity);
        if s.product < s.alpha_squared {
            prop_assert!(!s.is_tight());
        }
    }

    #[test]
    fn weak_duality_measure(n in 2u32..=4, picks in prop::collection::vec(any::<usize>(), 1..4), den in 4i64..=10) {
        let p: Rational = rat(1, 3).min(rat(1, den) * rat(3, 2));
        let graph = ConflictGraph::cube(n, 2).unwrap();
        let f = seed(&graph, &picks);
        let g = graph.closure(f);
        prop_assume!(g != 0);
        let cert = DualCertificateMeasure::construct(&p, n).unwrap();
        let s = slackness_check_measure(&cert, &graph.masks(f), &graph.masks(g)).unwrap();
        prop_assert!(s.cross_intersecting);
        prop_assert!(s.product <= s.alpha_squared);
        prop_assert!(s.duality_gap_identity);
    }
}
