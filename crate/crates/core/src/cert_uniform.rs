//! Dual certificate for the k-uniform bound `|F||G| <= C(n-2, k-2)^2` on
//! cross 2-intersecting families, with `P = e0 B_0 + e1 B_1`, `Q = g0 B_0 + g1 B_1`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::certificate::{
    block_trace, min_margin, p_support, psd_fields, slackness, AffineConstraint, Block, Constraint,
    Eps1Window, EntryForms, MatrixReport, SlacknessReport,
};
use crate::error::{Error, Result};
use crate::exactlin::{trace_power, RectMatrix, SymMatrix};
use crate::exactnum::{binom, binom_q, int, ratstr, Rational};
use crate::johnson::{lambda0_uniform, lambda1_uniform, spectral_table_uniform, UniformGround};

fn check_range(n: u32, k: u32) -> Result<()> {
    if k < 3 {
        return Err(Error::Unsupported(format!(
            "certificates need k >= 3 (got k={k}); k = 2 is covered by the oracle"
        )));
    }
    if n < 3 * (k - 1) {
        return Err(Error::OutOfRange(format!("need n >= 3(k-1) = {}, got n={n}", 3 * (k - 1))));
    }
    Ok(())
}

/// `C(n, k) / C(n-k, k)`.
fn d_ratio(n: u32, k: u32) -> Rational {
    Rational::new(binom(n as i64, k as i64), binom(n as i64 - k as i64, k as i64))
}

/// `C(n-2, k-2)`.
pub fn alpha_uniform(n: u32, k: u32) -> Rational {
    binom_q(n as i64 - 2, k as i64 - 2)
}

/// `(eps0, gamma0, gamma1)` for the given `eps1`.
pub fn build_params_uniform(n: u32, k: u32, eps1: &Rational) -> Result<(Rational, Rational, Rational)> {
    check_range(n, k)?;
    let (ni, ki) = (n as i64, k as i64);
    let d = d_ratio(n, k);
    let c = Rational::new(BigInt::from(ki * ki), BigInt::from(ni - 2 * ki + 1));
    let nn1 = int(ni * (ni - 1));
    let eps0 = -&c * eps1 + int(ki * (ki - 1)) / (int(2) * &nn1) * &d;
    let gamma0 = &c * eps1 + (int(ki * ki * (ni - ki)) / &nn1 - int(1)) / int(2) * &d;
    let gamma1 = -eps1.clone() - int((ni - ki) * (ni - 2 * ki + 1)) / (int(2) * &nn1) * &d;
    Ok((eps0, gamma0, gamma1))
}

/// The blocks `[[u_j, v_j], [v_j, u_j]]` for `j = 0..=k`.
pub fn blocks_uniform(
    n: u32,
    k: u32,
    eps0: &Rational,
    eps1: &Rational,
    gamma0: &Rational,
    gamma1: &Rational,
) -> Result<Vec<Block>> {
    check_range(n, k)?;
    let lambdas = lambda_table(n, k)?;
    Ok(blocks_from_table(n, k, &lambdas, eps0, eps1, gamma0, gamma1))
}

fn lambda_table(n: u32, k: u32) -> Result<Vec<(Rational, Rational)>> {
    (0..=k)
        .map(|j| Ok((lambda0_uniform(n, k, j)?, lambda1_uniform(n, k, j)?)))
        .collect()
}

fn blocks_from_table(
    n: u32,
    k: u32,
    lambdas: &[(Rational, Rational)],
    eps0: &Rational,
    eps1: &Rational,
    gamma0: &Rational,
    gamma1: &Rational,
) -> Vec<Block> {
    let half_alpha = alpha_uniform(n, k) / int(2);
    let delta0 = -binom_q(n as i64, k as i64) / int(2);
    lambdas
        .iter()
        .enumerate()
        .map(|(j, (l0, l1))| {
            let u = &half_alpha - eps0 * l0 - eps1 * l1;
            let delta = if j == 0 { delta0.clone() } else { Rational::zero() };
            let v = delta - gamma0 * l0 - gamma1 * l1;
            Block::new(j as u32, u, v)
        })
        .collect()
}

/// Affine constraints in eps1, read off from blocks at `eps1 = 0` and `eps1 = 1`.
fn constraints(n: u32, k: u32, lambdas: &[(Rational, Rational)]) -> Result<Vec<AffineConstraint>> {
    let at = |e: &Rational| -> Result<(Rational, Vec<Block>)> {
        let (e0, g0, g1) = build_params_uniform(n, k, e)?;
        let blocks = blocks_from_table(n, k, lambdas, &e0, e, &g0, &g1);
        Ok((e0, blocks))
    };
    let (e0_at0, b0) = at(&Rational::zero())?;
    let (e0_at1, b1) = at(&Rational::one())?;
    let mut out = vec![AffineConstraint {
        label: Constraint::Eps0Positive,
        slope: &e0_at1 - &e0_at0,
        constant: e0_at0,
        strict: true,
    }];
    for (x, y) in b0.iter().zip(&b1) {
        out.push(AffineConstraint {
            label: Constraint::Plus(x.j),
            constant: x.margin_plus.clone(),
            slope: &y.margin_plus - &x.margin_plus,
            strict: false,
        });
        out.push(AffineConstraint {
            label: Constraint::Minus(x.j),
            constant: x.margin_minus.clone(),
            slope: &y.margin_minus - &x.margin_minus,
            strict: false,
        });
    }
    Ok(out)
}

/// The exact set of `eps1 > 0` for which every block is PSD and `eps0 > 0`.
pub fn eps1_window_uniform(n: u32, k: u32) -> Result<Eps1Window> {
    check_range(n, k)?;
    let lambdas = lambda_table(n, k)?;
    Eps1Window::solve(Rational::zero(), false, &constraints(n, k, &lambdas)?)
        .ok_or_else(|| Error::EmptyWindow(format!("uniform n={n}, k={k}")))
}

#[derive(Clone, Debug, Serialize)]
pub struct DualCertificateUniform {
    pub setting: &'static str,
    pub n: u32,
    pub k: u32,
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
    pub eps1_window: Eps1Window,
}

impl DualCertificateUniform {
    /// The certificate at the midpoint of the exact window.
    pub fn construct(n: u32, k: u32) -> Result<Self> {
        let window = eps1_window_uniform(n, k)?;
        let eps1 = window.midpoint();
        Self::assemble(n, k, eps1, window)
    }

    /// The certificate at a caller-chosen `eps1`; `feasible` may be false.
    pub fn with_eps1(n: u32, k: u32, eps1: Rational) -> Result<Self> {
        let window = eps1_window_uniform(n, k)?;
        Self::assemble(n, k, eps1, window)
    }

    fn assemble(n: u32, k: u32, eps1: Rational, window: Eps1Window) -> Result<Self> {
        let (eps0, gamma0, gamma1) = build_params_uniform(n, k, &eps1)?;
        let blocks = blocks_uniform(n, k, &eps0, &eps1, &gamma0, &gamma1)?;
        let feasible =
            eps0.is_positive() && eps1.is_positive() && blocks.iter().all(Block::is_psd);
        Ok(DualCertificateUniform {
            setting: "uniform",
            n,
            k,
            alpha: alpha_uniform(n, k),
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

    /// `eps0 > 0` and `eps1 > 0`, so `P` is positive wherever `|x cap y| <= 1`.
    pub fn strict(&self) -> bool {
        self.eps0.is_positive() && self.eps1.is_positive()
    }

    fn p_entry(&self, x: u64, y: u64) -> Rational {
        match (x & y).count_ones() {
            0 => self.eps0.clone(),
            1 => self.eps1.clone(),
            _ => Rational::zero(),
        }
    }

    fn q_entry(&self, x: u64, y: u64) -> Rational {
        match (x & y).count_ones() {
            0 => self.gamma0.clone(),
            1 => self.gamma1.clone(),
            _ => Rational::zero(),
        }
    }
}

/// The diagnostic quantities of the feasibility argument at level `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofQuantities {
    #[serde(with = "ratstr")]
    pub f: Rational,
    #[serde(with = "ratstr")]
    pub g: Rational,
    #[serde(with = "ratstr")]
    pub h: Rational,
    /// The cubic `F(n)`; it does not depend on `j`.
    #[serde(with = "ratstr")]
    pub big_f: Rational,
    #[serde(with = "ratstr")]
    pub e_j: Rational,
}

pub fn proof_quantities(n: u32, k: u32, j: u32) -> Result<ProofQuantities> {
    check_range(n, k)?;
    if j > k {
        return Err(Error::OutOfRange(format!("level j={j} exceeds k={k}")));
    }
    let (n, k, j) = (n as i64, k as i64, j as i64);
    let f = int(-(n - k) * j * j + (n + 1) * (n - k) * j - n * (n - 1));
    let kk1 = int(k * (k - 1));
    let g = binom_q(n - k - j, k - j) / binom_q(n - k, k) * (int(1) + &f / &kk1);
    let h = int(j * j * (2 * k - n - 2) + j * n * (-2 * k + n + 2) + 2 * k * k - 2 * k - n * n + n);
    let big_f = int(n * n * n - (5 * k - 1) * n * n + (6 * k * k + 5 * k - 8) * n - 12 * k * k + 12 * k)
        + Rational::new(BigInt::from(2), BigInt::from(k))
        - int(1);
    let d = d_ratio(n as u32, k as u32);
    let e_j = int(4 * n * (n - 1) * j * (n - j + 1)) / (kk1 * int(n - 2 * k + 1) * d);
    Ok(ProofQuantities { f, g, h, big_f, e_j })
}

/// Multiplicities `C(n,j) - C(n,j-1)` aligned with the blocks.
fn multiplicities(n: u32, k: u32) -> Result<Vec<BigInt>> {
    Ok(spectral_table_uniform(n, k)?
        .levels
        .into_iter()
        .map(|l| l.mult)
        .collect())
}

/// The full `S` and `Z` on `2 C(n,k)` points, sets in colex order on each side.
pub fn assemble_s_uniform(cert: &DualCertificateUniform, cap: usize) -> Result<(SymMatrix, SymMatrix)> {
    let size = 2 * crate::johnson::small_binom(cert.n, cert.k) as usize;
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }
    let ground = UniformGround::new(cert.n, cert.k, cap)?;
    let sets = ground.subsets();
    let half_alpha = &cert.alpha / int(2);
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let p = SymMatrix::from_fn(sets.len(), |a, b| cert.p_entry(sets[a], sets[b]));
    let diag = SymMatrix::from_fn(sets.len(), |a, b| {
        let w = if a == b { half_alpha.clone() } else { Rational::zero() };
        w - cert.p_entry(sets[a], sets[b])
    });
    let off = RectMatrix::from_fn(sets.len(), sets.len(), |a, b| {
        -half.clone() - cert.q_entry(sets[a], sets[b])
    });
    let s = SymMatrix::from_blocks(&diag, &off, &diag)?;
    let zero = SymMatrix::zeros(sets.len());
    let z = SymMatrix::from_blocks(&p, &RectMatrix::zeros(sets.len(), sets.len()), &zero)?;
    let z = z.add(&SymMatrix::from_blocks(&zero, &RectMatrix::zeros(sets.len(), sets.len()), &p)?)?;
    Ok((s, z))
}

/// Assembles `S`, `Z` and runs the exact matrix-level checks.
pub fn matrix_check_uniform(cert: &DualCertificateUniform, cap: usize) -> Result<MatrixReport> {
    let (s, _z) = assemble_s_uniform(cert, cap)?;
    let ground = UniformGround::new(cert.n, cert.k, cap)?;
    let sets = ground.subsets();
    let p = SymMatrix::from_fn(sets.len(), |a, b| cert.p_entry(sets[a], sets[b]));
    let (z_nonnegative, z_support_exact) = p_support(&p, sets);
    let mults = multiplicities(cert.n, cert.k)?;
    let mut trace_identity = [false; 3];
    for (m, slot) in (1..=3u32).zip(trace_identity.iter_mut()) {
        *slot = trace_power(&s, m) == block_trace(&cert.blocks, &mults, m);
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

/// Slackness values of `cert` against the family pair `(F, G)` of k-set masks.
pub fn slackness_check_uniform(cert: &DualCertificateUniform, f: &[u64], g: &[u64]) -> SlacknessReport {
    let half_alpha = &cert.alpha / int(2);
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let weight = |_x: u64| Rational::one();
    let s_diag = |x: u64, y: u64| {
        let w = if x == y { half_alpha.clone() } else { Rational::zero() };
        w - cert.p_entry(x, y)
    };
    let s_off = |x: u64, y: u64| -half.clone() - cert.q_entry(x, y);
    let p = |x: u64, y: u64| cert.p_entry(x, y);
    let forms = EntryForms {
        weight: &weight,
        s_diag: &s_diag,
        s_off: &s_off,
        p: &p,
    };
    slackness(&forms, &cert.alpha, f, g, 2, cert.strict())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, QuadScalar};
    use proptest::prelude::*;

    const CAP: usize = 150;

    fn star(n: u32, k: u32, t: u64) -> Vec<u64> {
        UniformGround::new(n, k, 1000)
            .unwrap()
            .subsets()
            .iter()
            .copied()
            .filter(|&x| x & t == t)
            .collect()
    }

    #[test]
    fn params_example() {
        let (e0, _, _) = build_params_uniform(6, 3, &int(0)).unwrap();
        assert_eq!(e0, int(2));
    }

    #[test]
    fn range_errors() {
        assert!(matches!(build_params_uniform(5, 3, &int(0)), Err(Error::OutOfRange(_))));
        assert!(matches!(build_params_uniform(6, 2, &int(0)), Err(Error::Unsupported(_))));
    }

    /// u_1 in closed form: n/(2(n-k)) C(n-2,k-2) - e1 n/(n-2k+1) C(n-k-1,k-1).
    #[test]
    fn level_one_closed_form() {
        for (n, k) in [(6, 3), (9, 4), (20, 5), (40, 7)] {
            let e1 = rat(1, 97);
            let (e0, g0, g1) = build_params_uniform(n, k, &e1).unwrap();
            let b = blocks_uniform(n, k, &e0, &e1, &g0, &g1).unwrap();
            let (ni, ki) = (n as i64, k as i64);
            let u1 = int(ni) / int(2 * (ni - ki)) * alpha_uniform(n, k)
                - &e1 * int(ni) / int(ni - 2 * ki + 1) * binom_q(ni - ki - 1, ki - 1);
            assert_eq!(b[0].u, int(0));
            assert_eq!(b[0].v, int(0));
            assert_eq!(b[1].u, u1);
            assert_eq!(b[1].v, -u1);
        }
    }

    /// For j >= 2, u_j and v_j in the `C_j`, `D`, `f(j)` parametrization.
    #[test]
    fn higher_levels_match_reparametrization() {
        for (n, k) in [(6, 3), (10, 4), (12, 5), (33, 6)] {
            let e1 = rat(1, 1000);
            let (e0, g0, g1) = build_params_uniform(n, k, &e1).unwrap();
            let blocks = blocks_uniform(n, k, &e0, &e1, &g0, &g1).unwrap();
            let (ni, ki) = (n as i64, k as i64);
            let d = d_ratio(n, k);
            let nn1 = int(2 * ni * (ni - 1));
            for j in 2..=ki {
                let s = if j % 2 == 0 { int(1) } else { int(-1) };
                let cj = binom_q(ni - ki - j, ki - j);
                let a = int(j * (ni - j + 1)) / int(ni - 2 * ki + 1);
                let f = proof_quantities(n, k, j as u32).unwrap().f;
                let u = alpha_uniform(n, k) / int(2)
                    - &s * &cj * (-&a * &e1 + int(ki * (ki - 1)) / &nn1 * &d);
                let v = -&s * &cj * (&a * &e1 + &f / &nn1 * &d);
                assert_eq!(blocks[j as usize].u, u, "n={n} k={k} j={j}");
                assert_eq!(blocks[j as usize].v, v, "n={n} k={k} j={j}");
            }
        }
    }

    #[test]
    fn window_examples() {
        for (n, k) in [(6, 3), (9, 4), (7, 3)] {
            let w = eps1_window_uniform(n, k).unwrap();
            assert!(w.upper.as_ref().unwrap().is_positive());
            let c = DualCertificateUniform::construct(n, k).unwrap();
            assert!(c.feasible);
            assert!(w.contains(&c.eps1));
        }
    }

    /// Past the window, some margin goes negative.
    #[test]
    fn window_is_sharp() {
        for (n, k) in [(6, 3), (7, 3), (12, 4)] {
            let w = eps1_window_uniform(n, k).unwrap();
            let up = w.upper.clone().unwrap();
            let at = DualCertificateUniform::with_eps1(n, k, up.clone()).unwrap();
            assert_eq!(at.feasible, w.attained_at_upper);
            let past = DualCertificateUniform::with_eps1(n, k, up * rat(1001, 1000)).unwrap();
            assert!(!past.feasible);
        }
        let big = DualCertificateUniform::with_eps1(7, 3, int(10)).unwrap();
        assert!(!big.feasible);
    }

    #[test]
    fn proof_quantity_examples() {
        assert_eq!(proof_quantities(8, 3, 2).unwrap().f, int(14));
        assert_eq!(proof_quantities(7, 3, 2).unwrap().g, int(1));
        assert_eq!(proof_quantities(12, 5, 4).unwrap().h, int(36));
    }

    #[test]
    fn g4_closed_form() {
        for k in 4..12i64 {
            for n in 3 * (k - 1)..3 * (k - 1) + 20 {
                let g4 = proof_quantities(n as u32, k as u32, 4).unwrap().g;
                let expect = int((3 * n - k - 11) * (k - 2) * (k - 3))
                    / int((n - k - 3) * (n - k - 2) * (n - k - 1));
                assert_eq!(g4, expect);
                assert_eq!(
                    (n - k - 3) * (n - k - 2) * (n - k - 1) - (3 * n - k - 11) * (k - 2) * (k - 3),
                    (n - 3 * k + 3) * (n - 4) * (n - 5)
                );
            }
        }
    }

    #[test]
    fn assembled_matrix_examples() {
        for (n, k) in [(6, 3), (7, 3)] {
            let c = DualCertificateUniform::construct(n, k).unwrap();
            let r = matrix_check_uniform(&c, CAP).unwrap();
            assert!(r.psd && r.consistent() && r.z_support_exact, "{r:?}");
        }
    }

    #[test]
    fn infeasible_certificate_has_witness() {
        let c = DualCertificateUniform::with_eps1(6, 3, int(10)).unwrap();
        let r = matrix_check_uniform(&c, CAP).unwrap();
        assert!(!r.psd);
        assert!(r.witness_valid && r.blocks_agree);
    }

    /// Closed-form slackness against the block sums of the assembled matrices.
    #[test]
    fn slackness_matches_assembled_form() {
        let c = DualCertificateUniform::construct(6, 3).unwrap();
        let (s, z) = assemble_s_uniform(&c, CAP).unwrap();
        let sets = UniformGround::new(6, 3, CAP).unwrap().subsets().to_vec();
        let f = star(6, 3, 0b11);
        let g: Vec<u64> = sets.iter().copied().filter(|x| x.count_ones() == 3 && x & 0b1 == 1).collect();
        let r = slackness_check_uniform(&c, &f, &g);
        let (a, b) = (r.size_f.clone(), r.size_g.clone());
        let pad = |fam: &[u64], second: bool| -> Vec<Rational> {
            let half: Vec<Rational> = sets
                .iter()
                .map(|x| if fam.contains(x) { int(1) } else { int(0) })
                .collect();
            let zeros = vec![int(0); sets.len()];
            if second { [zeros, half].concat() } else { [half, zeros].concat() }
        };
        let (xf, xg) = (pad(&f, false), pad(&g, true));
        let s11 = s.quad_form(&xf);
        let s22 = s.quad_form(&xg);
        let s12 = s.bilinear(&xf, &xg);
        let ab = &a * &b;
        let expect = QuadScalar::new(&s11 / &a + &s22 / &b, int(2) * s12 / &ab, ab).unwrap();
        assert_eq!(r.s_dot_x, expect);
        assert_eq!(r.z_dot_x, z.quad_form(&xf) / &a + z.quad_form(&xg) / &b);
    }

    #[test]
    fn slackness_examples() {
        let c = DualCertificateUniform::construct(6, 3).unwrap();
        let s = star(6, 3, 0b11);
        let r = slackness_check_uniform(&c, &s, &s);
        assert!(r.is_tight() && r.attains_bound() && r.duality_gap_identity);

        let all = UniformGround::new(6, 3, CAP).unwrap().subsets().to_vec();
        let kn: Vec<u64> = all.iter().copied().filter(|x| (x & 0b1111).count_ones() >= 3).collect();
        let r = slackness_check_uniform(&c, &kn, &kn);
        assert!(r.is_tight() && r.attains_bound());

        let c7 = DualCertificateUniform::construct(7, 3).unwrap();
        let all7 = UniformGround::new(7, 3, CAP).unwrap().subsets().to_vec();
        let r = slackness_check_uniform(&c7, &all7, &all7);
        assert!(r.z_dot_x.is_positive());
        assert!(!r.cross_intersecting);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Even levels: u_j + v_j = alpha/2 (1 - g(j)), independent of eps1.
        #[test]
        fn even_margin_is_g(k in 3u32..14, extra in 0u32..60, num in 0i64..1000) {
            let n = 3 * (k - 1) + extra;
            let e1 = rat(num, 1_000_000);
            let (e0, g0, g1) = build_params_uniform(n, k, &e1).unwrap();
            let blocks = blocks_uniform(n, k, &e0, &e1, &g0, &g1).unwrap();
            let half = alpha_uniform(n, k) / int(2);
            for j in (2..=k).step_by(2) {
                let g = proof_quantities(n, k, j).unwrap().g;
                prop_assert_eq!(&blocks[j as usize].margin_plus, &(&half * (int(1) - g)));
            }
        }

        /// Odd levels: u_j - v_j = alpha/2 (1 - C_j/C(n-k,k) (E_j e1 - 1 + f/(k(k-1)))).
        #[test]
        fn odd_margin_matches_rewrite(k in 3u32..14, extra in 0u32..60, num in 0i64..1000) {
            let n = 3 * (k - 1) + extra;
            let e1 = rat(num, 1_000_000);
            let (e0, g0, g1) = build_params_uniform(n, k, &e1).unwrap();
            let blocks = blocks_uniform(n, k, &e0, &e1, &g0, &g1).unwrap();
            let half = alpha_uniform(n, k) / int(2);
            let (ni, ki) = (n as i64, k as i64);
            for j in (3..=k).step_by(2) {
                let pq = proof_quantities(n, k, j).unwrap();
                let ratio = binom_q(ni - ki - j as i64, ki - j as i64) / binom_q(ni - ki, ki);
                let rhs = ratio * (&pq.e_j * &e1 - int(1) + &pq.f / int(ki * (ki - 1)));
                prop_assert_eq!(&blocks[j as usize].margin_minus, &(&half * (int(1) - rhs)));
            }
        }

        #[test]
        fn level_zero_and_one(k in 3u32..20, extra in 0u32..100) {
            let n = 3 * (k - 1) + extra;
            let c = DualCertificateUniform::construct(n, k).unwrap();
            prop_assert!(c.feasible);
            prop_assert!(c.blocks[0].u.is_zero() && c.blocks[0].v.is_zero());
            prop_assert!(c.blocks[1].margin_plus.is_zero());
            prop_assert!(c.eps1_window.binding.iter().all(|b| !matches!(b, Constraint::Plus(0) | Constraint::Minus(0))));
        }
    }
}
