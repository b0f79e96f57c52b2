//! The Johnson scheme `J(n, k)`: ranked k-subsets, the intersection matrices
//! `B_0`, `B_1`, the matrices `D_f`, `W_{f,k}`, and their eigenvalue tables.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{trace_power, RectMatrix, SymMatrix};
use crate::exactnum::{binom, binom_q, int, pow, ratstr, sign_pow, Rational};

/// `C(n, r)` for small arguments, as a machine integer.
pub(crate) fn small_binom(n: u32, r: u32) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r) as u128;
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}

/// All k-subsets of `[n]` in colexicographic order, encoded as bitmasks
/// (bit `i` set means element `i + 1` is present).
#[derive(Clone, Debug)]
pub struct UniformGround {
    n: u32,
    k: u32,
    subsets: Vec<u64>,
}

impl UniformGround {
    /// Enumerates the ground set; refuses when `C(n, k)` exceeds `cap`.
    pub fn new(n: u32, k: u32, cap: usize) -> Result<Self> {
        if n == 0 || n > 64 || k == 0 || k > n {
            return Err(Error::OutOfRange(format!("need 1 <= k <= n <= 64, got n={n}, k={k}")));
        }
        let count = small_binom(n, k);
        if count > cap as u128 {
            return Err(Error::CapExceeded {
                size: count.min(usize::MAX as u128) as usize,
                cap,
            });
        }
        let mut subsets = Vec::with_capacity(count as usize);
        // Gosper's hack visits k-subsets in increasing numeric (= colex) order
        let mut x: u64 = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        loop {
            subsets.push(x);
            if subsets.len() as u128 == count {
                break;
            }
            let c = x & x.wrapping_neg();
            let r = x + c;
            x = (((r ^ x) >> 2) / c) | r;
        }
        Ok(UniformGround { n, k, subsets })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn unrank(&self, i: usize) -> u64 {
        self.subsets[i]
    }

    /// Colex rank: `sum_i C(c_i, i + 1)` over the sorted elements `c_0 < c_1 < ...`.
    pub fn rank(&self, mask: u64) -> Option<usize> {
        if mask.count_ones() != self.k || (self.n < 64 && mask >> self.n != 0) {
            return None;
        }
        let mut rank = 0u128;
        let mut m = mask;
        let mut idx = 1;
        while m != 0 {
            let c = m.trailing_zeros();
            rank += small_binom(c, idx);
            idx += 1;
            m &= m - 1;
        }
        Some(rank as usize)
    }

    pub fn subsets(&self) -> &[u64] {
        &self.subsets
    }

    /// Symmetric matrix with entries `f(|x cap y|)`.
    pub fn intersection_matrix(&self, f: impl Fn(u32) -> Rational) -> SymMatrix {
        let table: Vec<Rational> = (0..=self.k).map(f).collect();
        SymMatrix::from_fn(self.len(), |a, b| {
            table[(self.subsets[a] & self.subsets[b]).count_ones() as usize].clone()
        })
    }
}

/// One eigenspace level `j`: the two eigenvalues and the multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralLevel {
    pub j: u32,
    #[serde(with = "ratstr")]
    pub lambda0: Rational,
    #[serde(with = "ratstr")]
    pub lambda1: Rational,
    #[serde(serialize_with = "crate::certificate::bigint_str")]
    pub mult: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralTable {
    pub levels: Vec<SpectralLevel>,
}

impl SpectralTable {
    pub fn total_multiplicity(&self) -> BigInt {
        self.levels.iter().map(|l| &l.mult).sum()
    }
}

fn check_level(k: u32, j: u32) -> Result<()> {
    if j > k {
        return Err(Error::OutOfRange(format!("level j={j} exceeds k={k}")));
    }
    Ok(())
}

/// `lambda_0(j) = (-1)^j C(n-k-j, k-j)`.
pub fn lambda0_uniform(n: u32, k: u32, j: u32) -> Result<Rational> {
    check_level(k, j)?;
    let (n, k, j) = (n as i64, k as i64, j as i64);
    Ok(sign_pow(j) * binom_q(n - k - j, k - j))
}

/// `lambda_1(j) = (-1)^j C(n-k-j, k-j) ((n-k-j+1)(k-j)/(n-2k+1) - k)`.
pub fn lambda1_uniform(n: u32, k: u32, j: u32) -> Result<Rational> {
    check_level(k, j)?;
    let (n, k, j) = (n as i64, k as i64, j as i64);
    let den = n - 2 * k + 1;
    if den <= 0 {
        return Err(Error::DegenerateDenominator(den));
    }
    let inner = Rational::new(BigInt::from((n - k - j + 1) * (k - j)), BigInt::from(den)) - int(k);
    Ok(sign_pow(j) * binom_q(n - k - j, k - j) * inner)
}

/// The 0/1 matrix `(B_i)_{x,y} = [|x cap y| = i]` for `i` in `{0, 1}`.
pub fn materialize_b(n: u32, k: u32, i: u32, cap: usize) -> Result<SymMatrix> {
    if i > 1 {
        return Err(Error::OutOfRange(format!("B_i is only provided for i in {{0,1}}, got {i}")));
    }
    let ground = UniformGround::new(n, k, cap)?;
    Ok(ground.intersection_matrix(|s| if s == i { int(1) } else { int(0) }))
}

/// `(D_f)_{x,y} = C(k - |x cap y|, f)`.
pub fn materialize_d(n: u32, k: u32, f: u32, cap: usize) -> Result<SymMatrix> {
    if f > k {
        return Err(Error::OutOfRange(format!("f={f} exceeds k={k}")));
    }
    let ground = UniformGround::new(n, k, cap)?;
    Ok(ground.intersection_matrix(|s| binom_q(k as i64 - s as i64, f as i64)))
}

fn inclusion_matrix(n: u32, f: u32, k: u32, cap: usize, disjoint: bool) -> Result<RectMatrix> {
    let rows = if f == 0 {
        vec![0u64]
    } else {
        UniformGround::new(n, f, cap)?.subsets
    };
    let cols = UniformGround::new(n, k, cap)?;
    Ok(RectMatrix::from_fn(rows.len(), cols.len(), |a, b| {
        let (x, y) = (rows[a], cols.unrank(b));
        let hit = if disjoint { x & y == 0 } else { x & y == x };
        if hit {
            Rational::one()
        } else {
            Rational::zero()
        }
    }))
}

/// `(W_{f,k})_{x,y} = [x subset y]`, rows indexed by f-subsets.
pub fn w_matrix(n: u32, f: u32, k: u32, cap: usize) -> Result<RectMatrix> {
    inclusion_matrix(n, f, k, cap, false)
}

/// `(W-bar_{f,k})_{x,y} = [x cap y = empty]`.
pub fn w_bar_matrix(n: u32, f: u32, k: u32, cap: usize) -> Result<RectMatrix> {
    inclusion_matrix(n, f, k, cap, true)
}

/// Eigenvalues and multiplicities `C(n,j) - C(n,j-1)` for `j = 0..=k`.
pub fn spectral_table_uniform(n: u32, k: u32) -> Result<SpectralTable> {
    if n < 2 * k {
        return Err(Error::OutOfRange(format!("need n >= 2k, got n={n}, k={k}")));
    }
    let levels = (0..=k)
        .map(|j| {
            Ok(SpectralLevel {
                j,
                lambda0: lambda0_uniform(n, k, j)?,
                lambda1: lambda1_uniform(n, k, j)?,
                mult: binom(n as i64, j as i64) - binom(n as i64, j as i64 - 1),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralTable { levels })
}

/// Checks `trace(B_i^m) = sum_j mult(j) lambda_i(j)^m` for `m = 0..=3` and
/// that `prod_j (B_i - lambda_i(j) I)` vanishes.
pub fn verify_spectrum_by_traces(n: u32, k: u32, i: u32, cap: usize) -> Result<bool> {
    let table = spectral_table_uniform(n, k)?;
    let b = materialize_b(n, k, i, cap)?;
    let eig = |l: &SpectralLevel| if i == 0 { l.lambda0.clone() } else { l.lambda1.clone() };

    for m in 0..=3u32 {
        let expect: Rational = table
            .levels
            .iter()
            .map(|l| Rational::from_integer(l.mult.clone()) * pow(&eig(l), m as usize))
            .sum();
        if trace_power(&b, m) != expect {
            return Ok(false);
        }
    }

    let mut distinct: Vec<Rational> = Vec::new();
    for l in &table.levels {
        if l.mult.is_zero() {
            continue;
        }
        let v = eig(l);
        if !distinct.contains(&v) {
            distinct.push(v);
        }
    }
    Ok(annihilates(&b, &distinct))
}

/// Whether `prod_v (M - v I)` is the zero matrix.
pub(crate) fn annihilates(m: &SymMatrix, values: &[Rational]) -> bool {
    let dim = m.dim();
    let shifted = |v: &Rational| {
        let mut r = m.to_rect();
        for d in 0..dim {
            let x = r.get(d, d) - v;
            r.set(d, d, x);
        }
        r
    };
    let mut iter = values.iter();
    let Some(first) = iter.next() else {
        return dim == 0;
    };
    let mut acc = shifted(first);
    for v in iter {
        if acc.is_zero() {
            break;
        }
        acc = acc.mul(&shifted(v)).expect("square");
    }
    acc.is_zero()
}

/// The Perron value of `B_1` on the all-ones vector, `k C(n-k, k-1)`.
pub fn b1_row_sum(n: u32, k: u32) -> BigInt {
    BigInt::from(k) * binom(n as i64 - k as i64, k as i64 - 1)
}

/// `C(n-k, k)`, the row sum of `B_0`.
pub fn b0_row_sum(n: u32, k: u32) -> BigInt {
    binom(n as i64 - k as i64, k as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::RectMatrix;

    const CAP: usize = 150;

    #[test]
    fn ground_rank_unrank() {
        let g = UniformGround::new(7, 3, CAP).unwrap();
        assert_eq!(g.len(), 35);
        for i in 0..g.len() {
            let m = g.unrank(i);
            assert_eq!(m.count_ones(), 3);
            assert_eq!(g.rank(m), Some(i));
        }
        assert_eq!(g.unrank(0), 0b111);
        assert_eq!(g.rank(0b1111), None);
    }

    #[test]
    fn ground_respects_cap() {
        assert!(matches!(
            UniformGround::new(10, 5, CAP),
            Err(Error::CapExceeded { size: 252, cap: 150 })
        ));
    }

    #[test]
    fn lambda0_examples() {
        assert_eq!(lambda0_uniform(7, 3, 0).unwrap(), int(4));
        assert_eq!(lambda0_uniform(7, 3, 1).unwrap(), int(-3));
        assert_eq!(lambda0_uniform(7, 3, 3).unwrap(), int(-1));
        assert!(lambda0_uniform(7, 3, 4).is_err());
    }

    #[test]
    fn lambda1_examples() {
        assert_eq!(lambda1_uniform(7, 3, 0).unwrap(), int(18));
        assert_eq!(lambda1_uniform(7, 3, 1).unwrap(), int(-3));
        assert_eq!(lambda1_uniform(7, 3, 3).unwrap(), int(3));
        assert_eq!(
            lambda1_uniform(5, 3, 0),
            Err(Error::DegenerateDenominator(0))
        );
    }

    /// Eigenvalues of B_1 at (7,3) from the trace identities: solve for the
    /// multiset with the known multiplicities by brute force over small
    /// integers, independent of the closed form.
    #[test]
    fn lambda1_matches_trace_oracle() {
        let b = materialize_b(7, 3, 1, CAP).unwrap();
        let t: Vec<Rational> = (1..=3).map(|m| trace_power(&b, m)).collect();
        let mult = [1i64, 6, 14, 14];
        let mut found = Vec::new();
        // B_1 row sum is the j=0 eigenvalue
        let l0 = 18i64;
        for l1 in -20i64..=20 {
            for l2 in -20i64..=20 {
                for l3 in -20i64..=20 {
                    let ls = [l0, l1, l2, l3];
                    let ok = (1..=3).all(|m| {
                        let s: i64 = ls.iter().zip(mult).map(|(l, c)| c * l.pow(m)).sum();
                        int(s) == t[m as usize - 1]
                    });
                    if ok {
                        found.push(ls);
                    }
                }
            }
        }
        assert!(found.contains(&[18, -3, -3, 3]), "{found:?}");
        let closed: Vec<Rational> = (0..=3).map(|j| lambda1_uniform(7, 3, j).unwrap()).collect();
        assert_eq!(closed, vec![int(18), int(-3), int(-3), int(3)]);
    }

    #[test]
    fn b_row_sums() {
        let b0 = materialize_b(4, 2, 0, CAP).unwrap();
        for r in 0..b0.dim() {
            let s: Rational = (0..b0.dim()).map(|c| b0.get(r, c).clone()).sum();
            assert_eq!(s, int(1));
        }
        assert_eq!(trace_power(&b0, 1), int(0));

        let b1 = materialize_b(7, 3, 1, CAP).unwrap();
        for r in 0..b1.dim() {
            let s: Rational = (0..b1.dim()).map(|c| b1.get(r, c).clone()).sum();
            assert_eq!(s, int(18));
        }
        assert_eq!(b1_row_sum(7, 3), BigInt::from(18));
    }

    #[test]
    fn d_identities() {
        let (n, k) = (6, 3);
        let b0 = materialize_b(n, k, 0, CAP).unwrap();
        let b1 = materialize_b(n, k, 1, CAP).unwrap();
        let dk = materialize_d(n, k, k, CAP).unwrap();
        let dk1 = materialize_d(n, k, k - 1, CAP).unwrap();
        assert_eq!(b0, dk);
        assert_eq!(b1, dk1.sub(&dk.scale(&int(k as i64))).unwrap());

        let d0 = materialize_d(5, 2, 0, CAP).unwrap();
        assert_eq!(d0, SymMatrix::ones(10));
    }

    #[test]
    fn d_is_w_transpose_w_bar() {
        for f in 0..=3 {
            let w = w_matrix(6, f, 3, CAP).unwrap();
            let wb = w_bar_matrix(6, f, 3, CAP).unwrap();
            let prod: RectMatrix = w.transpose().mul(&wb).unwrap();
            assert_eq!(prod, materialize_d(6, 3, f, CAP).unwrap().to_rect(), "f={f}");
        }
    }

    #[test]
    fn spectral_table_examples() {
        let t = spectral_table_uniform(7, 3).unwrap();
        let mult: Vec<BigInt> = t.levels.iter().map(|l| l.mult.clone()).collect();
        assert_eq!(mult, [1, 6, 14, 14].map(BigInt::from).to_vec());
        assert_eq!(t.total_multiplicity(), BigInt::from(35));

        let t6 = spectral_table_uniform(6, 3).unwrap();
        let l0: Vec<Rational> = t6.levels.iter().map(|l| l.lambda0.clone()).collect();
        assert_eq!(l0, vec![int(1), int(-1), int(1), int(-1)]);

        assert!(spectral_table_uniform(5, 3).is_err());
    }

    #[test]
    fn spectrum_by_traces_examples() {
        assert!(verify_spectrum_by_traces(6, 3, 0, CAP).unwrap());
        assert!(verify_spectrum_by_traces(7, 3, 1, CAP).unwrap());
        assert!(verify_spectrum_by_traces(5, 2, 0, CAP).unwrap());
    }

    #[test]
    fn spectrum_by_traces_rejects_wrong_values() {
        let b = materialize_b(6, 3, 0, CAP).unwrap();
        assert!(annihilates(&b, &[int(1), int(-1)]));
        assert!(!annihilates(&b, &[int(1)]));
    }

    #[test]
    fn perron_values() {
        for (n, k) in [(6u32, 3u32), (7, 3), (8, 4), (9, 2)] {
            assert_eq!(lambda0_uniform(n, k, 0).unwrap(), Rational::from_integer(b0_row_sum(n, k)));
            assert_eq!(lambda1_uniform(n, k, 0).unwrap(), Rational::from_integer(b1_row_sum(n, k)));
        }
    }
}
