//! Dual certificate for `mu_p(F) mu_p(G) <= p^4` on cross 2-intersecting
//! families in `2^[n]`, for rational `0 < p <= 1/3`.
//!
//! At `p = 1/3` the level-3 margin is `u_3 - v_3 = -9 e1 / (4n)`, so the only
//! admissible `eps1` is `0` once `n >= 3`; the certificate is still feasible but
//! `P` then vanishes on pairs meeting in exactly one point.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::certificate::{
    block_trace, min_margin, p_support, psd_fields, slackness, AffineConstraint, Block, Constraint,
    Eps1Window, EntryForms, MatrixReport, SlacknessReport,
};
use crate::error::{Error, Result};
use crate::exactlin::{RectMatrix, SymMatrix};
use crate::exactnum::{binom, int, pow, rat, ratstr, Rational};
use crate::hamming::{b0_entry, b1_entry, lambda_measure, materialize_measure, BiasedCube, MeasureMatrix};

fn check_p(p: &Rational) -> Result<()> {
    if !p.is_positive() || p > &rat(1, 3) {
        return Err(Error::OutOfRange(format!("p must lie in (0, 1/3], got {p}")));
    }
    Ok(())
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be >= 1".into()));
    }
    Ok(())
}

fn params_unchecked(p: &Rational, n: u32, eps1: &Rational) -> (Rational, Rational, Rational) {
    let q = Rational::one() - p;
    let half = rat(1, 2);
    let pqn = p * &q * int(n as i64);
    let eps0 = p * p / int(2) - eps1;
    let gamma0 = -half.clone() + &half * &pqn + eps1;
    let gamma1 = -(&half * &pqn) - eps1;
    (eps0, gamma0, gamma1)
}

/// `(eps0, gamma0, gamma1)` for `0 <= eps1 < p^2/2`.
pub fn build_params_measure(p: &Rational, n: u32, eps1: &Rational) -> Result<(Rational, Rational, Rational)> {
    check_p(p)?;
    check_n(n)?;
    if eps1.is_negative() || eps1 >= &(p * p / int(2)) {
        return Err(Error::OutOfRange(format!("eps1 must lie in [0, p^2/2), got {eps1}")));
    }
    Ok(params_unchecked(p, n, eps1))
}

fn lambda_table(p: &Rational, n: u32) -> Result<Vec<(Rational, Rational)>> {
    (0..=n)
        .map(|j| Ok((lambda_measure(p, n, j, 0)?, lambda_measure(p, n, j, 1)?)))
        .collect()
}

fn blocks_from_table(
    p: &Rational,
    lambdas: &[(Rational, Rational)],
    eps0: &Rational,
    eps1: &Rational,
    gamma0: &Rational,
    gamma1: &Rational,
) -> Vec<Block> {
    let half_alpha = p * p / int(2);
    lambdas
        .iter()
        .enumerate()
        .map(|(j, (l0, l1))| {
            let u = &half_alpha - eps0 * l0 - eps1 * l1;
            let delta = if j == 0 { rat(-1, 2) } else { Rational::zero() };
            let v = delta - gamma0 * l0 - gamma1 * l1;
            Block::new(j as u32, u, v)
        })
        .collect()
}

/// The blocks for `j = 0..=n`.
pub fn blocks_measure(
    p: &Rational,
    n: u32,
    eps0: &Rational,
    eps1: &Rational,
    gamma0: &Rational,
    gamma1: &Rational,
) -> Result<Vec<Block>> {
    check_p(p)?;
    check_n(n)?;
    Ok(blocks_from_table(p, &lambda_table(p, n)?, eps0, eps1, gamma0, gamma1))
}

/// The exact set of `eps1 >= 0` with `eps0 > 0` and every block PSD.
pub fn eps1_window_measure(p: &Rational, n: u32) -> Result<Eps1Window> {
    check_p(p)?;
    check_n(n)?;
    let lambdas = lambda_table(p, n)?;
    let at = |e: &Rational| {
        let (e0, g0, g1) = params_unchecked(p, n, e);
        blocks_from_table(p, &lambdas, &e0, e, &g0, &g1)
    };
    let (b0, b1) = (at(&Rational::zero()), at(&Rational::one()));
    let mut cs = vec![AffineConstraint {
        label: Constraint::Eps0Positive,
        constant: p * p / int(2),
        slope: int(-1),
        strict: true,
    }];
    for (x, y) in b0.iter().zip(&b1) {
        cs.push(AffineConstraint {
            label: Constraint::Plus(x.j),
            constant: x.margin_plus.clone(),
            slope: &y.margin_plus - &x.margin_plus,
            strict: false,
        });
        cs.push(AffineConstraint {
            label: Constraint::Minus(x.j),
            constant: x.margin_minus.clone(),
            slope: &y.margin_minus - &x.margin_minus,
            strict: false,
        });
    }
    Eps1Window::solve(Rational::zero(), true, &cs)
        .ok_or_else(|| Error::EmptyWindow(format!("measure p={p}, n={n}")))
}

#[derive(Clone, Debug, Serialize)]
pub struct DualCertificateMeasure {
    pub setting: &'static str,
    pub n: u32,
    #[serde(with = "ratstr")]
    pub p: Rational,
    #[serde(with = "ratstr")]
    pub alpha: Rational,
    #[serde(with = "ratstr")]
    pub eps0: Rational,
    #[serde(with = "ratstr")]
    pub eps1: Rational,
    #[serde(with = "ratstr")]
    pub gamma0: Rational,
    #[serde(with = "ratstr")]
    pub gamma1: Rational,
    pub blocks: Vec<Block>,
    pub feasible: bool,
    /// `eps1 > 0`, which makes `P` positive on every pair with `|x cap y| <= 1`.
    pub strict: bool,
    pub eps1_window: Eps1Window,
}

impl DualCertificateMeasure {
    /// `eps1 = 0` at `p = 1/3`, otherwise the midpoint of the window.
    pub fn construct(p: &Rational, n: u32) -> Result<Self> {
        let window = eps1_window_measure(p, n)?;
        let eps1 = if p == &rat(1, 3) {
            Rational::zero()
        } else {
            window.midpoint()
        };
        Self::assemble(p, n, eps1, window)
    }

    pub fn with_eps1(p: &Rational, n: u32, eps1: Rational) -> Result<Self> {
        let window = eps1_window_measure(p, n)?;
        build_params_measure(p, n, &eps1)?;
        Self::assemble(p, n, eps1, window)
    }

    fn assemble(p: &Rational, n: u32, eps1: Rational, window: Eps1Window) -> Result<Self> {
        let (eps0, gamma0, gamma1) = build_params_measure(p, n, &eps1)?;
        let blocks = blocks_measure(p, n, &eps0, &eps1, &gamma0, &gamma1)?;
        let feasible = eps0.is_positive() && !eps1.is_negative() && blocks.iter().all(Block::is_psd);
        Ok(DualCertificateMeasure {
            setting: "measure",
            n,
            p: p.clone(),
            alpha: p * p,
            strict: eps1.is_positive(),
            eps0,
            eps1,
            gamma0,
            gamma1,
            blocks,
            feasible,
            eps1_window: window,
        })
    }

    pub fn min_margin(&self) -> Rational {
        min_margin(&self.blocks).unwrap_or_else(Rational::zero)
    }

    fn p_entry(&self, mu_x: &Rational, x: u64, y: u64) -> Rational {
        mu_x * (&self.eps0 * b0_entry(&self.p, self.n, x, y) + &self.eps1 * b1_entry(&self.p, self.n, x, y))
    }

    fn q_entry(&self, mu_x: &Rational, x: u64, y: u64) -> Rational {
        mu_x * (&self.gamma0 * b0_entry(&self.p, self.n, x, y) + &self.gamma1 * b1_entry(&self.p, self.n, x, y))
    }
}

fn check_cap(n: u32, cap: usize) -> Result<()> {
    let size = 2usize.saturating_mul(1usize.checked_shl(n).filter(|_| n < 62).unwrap_or(usize::MAX));
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }
    Ok(())
}

/// The full `S` and `Z` on `2 * 2^n` points, built from the tensor-product matrices.
pub fn assemble_s_measure(cert: &DualCertificateMeasure, cap: usize) -> Result<(SymMatrix, SymMatrix)> {
    check_cap(cert.n, cap)?;
    let (p, n) = (&cert.p, cert.n);
    let inner = cap / 2;
    let delta = materialize_measure(p, n, MeasureMatrix::Delta, inner)?;
    let djd = materialize_measure(p, n, MeasureMatrix::DeltaJDelta, inner)?;
    let db0 = materialize_measure(p, n, MeasureMatrix::DeltaB0, inner)?;
    let db1 = materialize_measure(p, n, MeasureMatrix::DeltaB1, inner)?;
    let pm = db0.scale(&cert.eps0).add(&db1.scale(&cert.eps1))?;
    let qm = db0.scale(&cert.gamma0).add(&db1.scale(&cert.gamma1))?;
    let half = rat(1, 2);
    let diag = delta.scale(&(&cert.alpha * &half)).sub(&pm)?.to_sym()?;
    let off = djd.scale(&-half).sub(&qm)?;
    let s = SymMatrix::from_blocks(&diag, &off, &diag)?;
    let p_sym = pm.to_sym()?;
    let dim = p_sym.dim();
    let z = SymMatrix::from_fn(2 * dim, |i, j| {
        if (i < dim) == (j < dim) {
            p_sym.get(i % dim, j % dim).clone()
        } else {
            Rational::zero()
        }
    });
    Ok((s, z))
}

/// `trace((D^{-1} S)^m)` for `m = 1, 2, 3`, with `D = diag(Delta, Delta)`.
///
/// `D^{-1} S` is similar to the block-diagonal form, while `S` itself is only
/// congruent to it.
fn scaled_traces(s: &SymMatrix, weights: &[Rational]) -> Result<[Rational; 3]> {
    let dim = s.dim();
    let half = weights.len();
    let m = RectMatrix::from_fn(dim, dim, |i, j| s.get(i, j) / &weights[i % half]);
    let t1: Rational = (0..dim).map(|i| m.get(i, i).clone()).sum();
    let mut t2 = Rational::zero();
    for i in 0..dim {
        for j in 0..dim {
            t2 += m.get(i, j) * m.get(j, i);
        }
    }
    let m2 = m.mul(&m)?;
    let mut t3 = Rational::zero();
    for i in 0..dim {
        for j in 0..dim {
            t3 += m2.get(i, j) * m.get(j, i);
        }
    }
    Ok([t1, t2, t3])
}

pub fn matrix_check_measure(cert: &DualCertificateMeasure, cap: usize) -> Result<MatrixReport> {
    let (s, z) = assemble_s_measure(cert, cap)?;
    let cube = BiasedCube::new(cert.n, cert.p.clone())?;
    let sets: Vec<u64> = (0..cube.points() as u64).collect();
    let weights: Vec<Rational> = sets.iter().map(|&x| cube.weight(x).clone()).collect();
    let dim = sets.len();
    let p_block = SymMatrix::from_fn(dim, |i, j| z.get(i, j).clone());
    let (z_nonnegative, z_support_exact) = p_support(&p_block, &sets);
    let mults: Vec<BigInt> = (0..=cert.n).map(|j| binom(cert.n as i64, j as i64)).collect();
    let traces = scaled_traces(&s, &weights)?;
    let mut trace_identity = [false; 3];
    for (m, slot) in (1..=3u32).zip(trace_identity.iter_mut()) {
        *slot = traces[m as usize - 1] == block_trace(&cert.blocks, &mults, m);
    }
    let (psd, witness_value, witness_valid) = psd_fields(&s);
    Ok(MatrixReport {
        dim: s.dim(),
        psd,
        witness_value,
        witness_valid,
        blocks_agree: psd == cert.blocks.iter().all(Block::is_psd),
        trace_identity,
        z_nonnegative,
        z_support_exact,
    })
}

/// Slackness values against `(F, G)`, families of masks in `2^[n]`.
pub fn slackness_check_measure(cert: &DualCertificateMeasure, f: &[u64], g: &[u64]) -> Result<SlacknessReport> {
    let cube = BiasedCube::new(cert.n, cert.p.clone())?;
    let half_alpha = &cert.alpha / int(2);
    let half = rat(1, 2);
    let weight = |x: u64| cube.weight(x).clone();
    let s_diag = |x: u64, y: u64| {
        let mu = cube.weight(x);
        let w = if x == y { mu * &half_alpha } else { Rational::zero() };
        w - cert.p_entry(mu, x, y)
    };
    let s_off = |x: u64, y: u64| {
        let mu = cube.weight(x);
        -(mu * cube.weight(y) * &half) - cert.q_entry(mu, x, y)
    };
    let p = |x: u64, y: u64| cert.p_entry(cube.weight(x), x, y);
    let forms = EntryForms {
        weight: &weight,
        s_diag: &s_diag,
        s_off: &s_off,
        p: &p,
    };
    Ok(slackness(&forms, &cert.alpha, f, g, 2, cert.strict && cert.eps0.is_positive()))
}

/// The quantity `p^2 - f(3)` with `f(j) = (p/q)^j (jq - 1 - p^2)`.
pub fn odd_level_reference(p: &Rational) -> Rational {
    let q = Rational::one() - p;
    p * p - pow(&(p / &q), 3) * (int(3) * &q - int(1) - p * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const CAP: usize = 128;

    fn star(n: u32, t: u64) -> Vec<u64> {
        (0..1u64 << n).filter(|x| x & t == t).collect()
    }

    #[test]
    fn params_example() {
        let (e0, g0, g1) = build_params_measure(&rat(1, 3), 3, &int(0)).unwrap();
        assert_eq!((e0, g0, g1), (rat(1, 18), rat(-1, 6), rat(-1, 3)));
    }

    #[test]
    fn range_errors() {
        assert!(build_params_measure(&rat(1, 2), 3, &int(0)).is_err());
        assert!(build_params_measure(&rat(1, 4), 3, &rat(1, 32)).is_err());
        assert!(build_params_measure(&rat(1, 4), 3, &rat(-1, 32)).is_err());
        assert!(build_params_measure(&rat(1, 4), 0, &int(0)).is_err());
    }

    #[test]
    fn window_examples() {
        let w = eps1_window_measure(&rat(1, 3), 5).unwrap();
        assert!(w.is_point() && w.lower.is_zero() && w.contains(&int(0)));
        assert!(w.binding.contains(&Constraint::Minus(3)));
        let w = eps1_window_measure(&rat(1, 4), 6).unwrap();
        assert!(w.upper.unwrap().is_positive());
    }

    #[test]
    fn small_n_at_one_third() {
        for n in 1..=2 {
            let w = eps1_window_measure(&rat(1, 3), n).unwrap();
            assert_eq!(w.upper, Some(rat(1, 18)));
            assert!(!w.attained_at_upper);
            assert!(DualCertificateMeasure::construct(&rat(1, 3), n).unwrap().eps1.is_zero());
        }
    }

    #[test]
    fn odd_reference_factorization() {
        for p in [rat(1, 10), rat(1, 5), rat(1, 4), rat(3, 10), rat(1, 3)] {
            let q = int(1) - &p;
            let expect = &p * &p * (int(1) - int(2) * &p) * (int(1) - int(3) * &p) / pow(&q, 3);
            assert_eq!(odd_level_reference(&p), expect);
        }
    }

    #[test]
    fn assembled_examples() {
        let c = DualCertificateMeasure::construct(&rat(1, 4), 4).unwrap();
        let r = matrix_check_measure(&c, CAP).unwrap();
        assert!(r.psd && r.consistent() && r.z_support_exact, "{r:?}");

        let c = DualCertificateMeasure::construct(&rat(1, 3), 5).unwrap();
        let r = matrix_check_measure(&c, CAP).unwrap();
        assert!(r.psd && r.consistent() && !r.z_support_exact, "{r:?}");

        let c = DualCertificateMeasure::with_eps1(&rat(1, 3), 5, rat(1, 1000)).unwrap();
        assert!(!c.feasible);
        let r = matrix_check_measure(&c, CAP).unwrap();
        assert!(!r.psd && r.witness_valid && r.consistent(), "{r:?}");
    }

    #[test]
    fn closed_forms_agree_with_tensor_assembly() {
        let c = DualCertificateMeasure::construct(&rat(1, 5), 3).unwrap();
        let (s, z) = assemble_s_measure(&c, CAP).unwrap();
        let cube = BiasedCube::new(3, rat(1, 5)).unwrap();
        for x in 0..8u64 {
            for y in 0..8u64 {
                let mu = cube.weight(x);
                assert_eq!(z.get(x as usize, y as usize), &c.p_entry(mu, x, y));
                let off = -(mu * cube.weight(y) / int(2)) - c.q_entry(mu, x, y);
                assert_eq!(s.get(x as usize, 8 + y as usize), &off);
            }
        }
    }

    #[test]
    fn slackness_examples() {
        let p = rat(1, 5);
        let c = DualCertificateMeasure::construct(&p, 4).unwrap();
        let st = star(4, 0b11);
        let r = slackness_check_measure(&c, &st, &st).unwrap();
        assert!(r.is_tight() && r.attains_bound() && r.duality_gap_identity && r.z_strict);

        let all = star(4, 0);
        let r = slackness_check_measure(&c, &all, &all).unwrap();
        assert!(r.z_dot_x.is_positive());

        let c = DualCertificateMeasure::construct(&rat(1, 3), 4).unwrap();
        let r = slackness_check_measure(&c, &st, &st).unwrap();
        assert!(r.s_dot_x.is_zero() && !r.z_strict);
        let b1 = materialize_measure(&rat(1, 3), 4, MeasureMatrix::DeltaB1, CAP).unwrap();
        let b0 = materialize_measure(&rat(1, 3), 4, MeasureMatrix::DeltaB0, CAP).unwrap();
        let pm = b0.scale(&c.eps0).add(&b1.scale(&c.eps1)).unwrap();
        assert!(pm.get(0b0011, 0b0101).is_zero());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// u_1 = -v_1 = (p^2 n - 2 e1) / (2qn) and the level-0 block vanishes.
        #[test]
        fn low_levels(pn in 1i64..34, n in 1u32..60, en in 0i64..100) {
            let p = rat(pn, 100);
            let e1 = &p * &p / int(2) * rat(en, 100);
            let (e0, g0, g1) = build_params_measure(&p, n, &e1).unwrap();
            let b = blocks_measure(&p, n, &e0, &e1, &g0, &g1).unwrap();
            let q = int(1) - &p;
            let ni = int(n as i64);
            let u1 = (&p * &p * &ni - int(2) * &e1) / (int(2) * &q * &ni);
            prop_assert!(b[0].u.is_zero() && b[0].v.is_zero());
            prop_assert_eq!(&b[1].u, &u1);
            prop_assert_eq!(&b[1].v, &-u1);
        }

        /// For j >= 2: u_j = (p^3 - (-p/q)^j (p^3 - 2 e1 j/n)) / (2p) and
        /// v_j = -(-p/q)^j (p(qj - 1) + 2 e1 j/n) / (2p).
        #[test]
        fn higher_levels(pn in 1i64..34, n in 2u32..40, en in 0i64..100) {
            let p = rat(pn, 100);
            let q = int(1) - &p;
            let e1 = &p * &p / int(2) * rat(en, 100);
            let (e0, g0, g1) = build_params_measure(&p, n, &e1).unwrap();
            let b = blocks_measure(&p, n, &e0, &e1, &g0, &g1).unwrap();
            let p3 = pow(&p, 3);
            for j in 2..=n {
                let r = pow(&-(&p / &q), j as usize);
                let t = int(2) * &e1 * int(j as i64) / int(n as i64);
                let u = (&p3 - &r * (&p3 - &t)) / (int(2) * &p);
                let v = -(&r * (&p * (&q * int(j as i64) - int(1)) + &t)) / (int(2) * &p);
                prop_assert_eq!(&b[j as usize].u, &u);
                prop_assert_eq!(&b[j as usize].v, &v);
            }
        }

        /// Even j: u_j + v_j = (p^2 - q (p/q)^j (j - 1 - p)) / 2, so u_2 + v_2 = 0.
        /// Odd j: u_j - v_j = (p^2 - (p/q)^j (jq - 1 - p^2) - (p/q)^j 4 j e1/(np)) / 2.
        #[test]
        fn margin_rewrites(pn in 1i64..34, n in 2u32..40, en in 0i64..100) {
            let p = rat(pn, 100);
            let q = int(1) - &p;
            let e1 = &p * &p / int(2) * rat(en, 100);
            let (e0, g0, g1) = build_params_measure(&p, n, &e1).unwrap();
            let b = blocks_measure(&p, n, &e0, &e1, &g0, &g1).unwrap();
            let pp = &p * &p;
            prop_assert!(b[2].margin_plus.is_zero());
            for j in 2..=n {
                let r = pow(&(&p / &q), j as usize);
                let ji = int(j as i64);
                if j % 2 == 0 {
                    let f = &r * (&ji - int(1) - &p);
                    prop_assert_eq!(&b[j as usize].margin_plus, &((&pp - &q * f) / int(2)));
                } else {
                    let f = &r * (&ji * &q - int(1) - &pp);
                    let extra = &r * int(4) * &ji * &e1 / (int(n as i64) * &p);
                    prop_assert_eq!(&b[j as usize].margin_minus, &((&pp - f - extra) / int(2)));
                }
            }
        }

        /// At p = 1/3: u_j + v_j = (-6(-1)^j j + 8(-1)^j + 2^j) / (9 2^(j+1)),
        /// u_3 - v_3 = -9 e1/(4n), and with e1 = 0, u_j - v_j = 1/18 + (-1)^j (3j - 5)/(9 2^j).
        #[test]
        fn one_third_levels(n in 3u32..80, en in 0i64..100) {
            let p = rat(1, 3);
            let e1 = rat(en, 1800);
            let (e0, g0, g1) = build_params_measure(&p, n, &e1).unwrap();
            let b = blocks_measure(&p, n, &e0, &e1, &g0, &g1).unwrap();
            prop_assert_eq!(&b[3].margin_minus, &(int(-9) * &e1 / int(4 * n as i64)));
            let (z0, zg0, zg1) = build_params_measure(&p, n, &int(0)).unwrap();
            let bz = blocks_measure(&p, n, &z0, &int(0), &zg0, &zg1).unwrap();
            for j in 2..=n {
                let s = if j % 2 == 0 { 1i64 } else { -1 };
                let ji = j as i64;
                let two_j = pow(&int(2), j as usize);
                let plus = (int(-6 * s * ji + 8 * s) + &two_j) / (int(18) * &two_j);
                prop_assert_eq!(&b[j as usize].margin_plus, &plus);
                let minus = rat(1, 18) + int(s * (3 * ji - 5)) / (int(9) * &two_j);
                prop_assert_eq!(&bz[j as usize].margin_minus, &minus);
            }
        }
    }
}
