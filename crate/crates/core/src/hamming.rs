//! The p-biased cube `2^[n]`: point weights, the 2x2 generators, the
//! tensor-product matrices `Delta`, `B_0`, `B_1`, `D_0`, `D_1`, their closed-form
//! entries, and an exact check of the listed matrix facts.
//!
//! Sets are `n`-bit masks; bit `i` addresses tensor factor `i`, and a set bit
//! means element `i + 1` is present. The irrational eigenvector matrix `V'` only
//! appears at the 2x2 level, in `Q[sqrt(p/q)]`; every `2^n`-dimensional identity
//! is checked through a rational restatement (`V^{-1} = V^T Delta`).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{kron, RectMatrix};
use crate::exactnum::{binom, int, pow, QuadScalar, Rational};
use crate::johnson::{SpectralLevel, SpectralTable};

pub type MeasureSpectralTable = SpectralTable;

pub(crate) fn check_p(p: &Rational) -> Result<()> {
    if !p.is_positive() || p >= &Rational::one() {
        return Err(Error::OutOfRange(format!("p must lie in (0, 1), got {p}")));
    }
    Ok(())
}

/// `2^[n]` with the product measure `mu_p({x}) = p^|x| q^(n-|x|)`.
#[derive(Clone, Debug)]
pub struct BiasedCube {
    n: u32,
    p: Rational,
    q: Rational,
    weights: Vec<Rational>,
}

impl BiasedCube {
    pub fn new(n: u32, p: Rational) -> Result<Self> {
        check_p(&p)?;
        if n == 0 || n > 20 {
            return Err(Error::OutOfRange(format!("cube dimension n={n} must be in 1..=20")));
        }
        let q = Rational::one() - &p;
        let by_level: Vec<Rational> = (0..=n as usize)
            .map(|j| pow(&p, j) * pow(&q, n as usize - j))
            .collect();
        let weights = (0..1u64 << n)
            .map(|x| by_level[x.count_ones() as usize].clone())
            .collect();
        Ok(BiasedCube { n, p, q, weights })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn points(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, x: u64) -> &Rational {
        &self.weights[x as usize]
    }

    pub fn measure(&self, family: &[u64]) -> Rational {
        family.iter().map(|&x| self.weight(x).clone()).sum()
    }

    pub fn total(&self) -> Rational {
        self.weights.iter().cloned().sum()
    }
}

/// `lambda_0(j) = (-p/q)^j` and `lambda_1(j) = (-p/q)^j (1 - j/(np))`.
pub fn lambda_measure(p: &Rational, n: u32, j: u32, i: u32) -> Result<Rational> {
    check_p(p)?;
    if j > n || n == 0 {
        return Err(Error::OutOfRange(format!("need 0 <= j <= n, n >= 1; got j={j}, n={n}")));
    }
    let ratio = -(p / (Rational::one() - p));
    let l0 = pow(&ratio, j as usize);
    match i {
        0 => Ok(l0),
        1 => Ok(l0 * (Rational::one() - int(j as i64) / (int(n as i64) * p))),
        _ => Err(Error::OutOfRange(format!("lambda_i only for i in {{0,1}}, got {i}"))),
    }
}

/// Eigenvalue table with multiplicities `C(n, j)`, `j = 0..=n`.
pub fn spectral_table_measure(p: &Rational, n: u32) -> Result<MeasureSpectralTable> {
    let levels = (0..=n)
        .map(|j| {
            Ok(SpectralLevel {
                j,
                lambda0: lambda_measure(p, n, j, 0)?,
                lambda1: lambda_measure(p, n, j, 1)?,
                mult: binom(n as i64, j as i64),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralTable { levels })
}

pub type QuadMatrix2 = [[QuadScalar; 2]; 2];

/// The 2x2 building blocks, rows and columns indexed by `0, 1`.
#[derive(Clone, Debug)]
pub struct Generators {
    /// `A' = [[1 - p/q, p/q], [1, 0]]`.
    pub a: RectMatrix,
    /// `D' = diag(1, -p/q)`.
    pub d: RectMatrix,
    /// `V' = [[1, sqrt(p/q)], [1, -sqrt(q/p)]]` in `Q[sqrt(p/q)]`.
    pub v: QuadMatrix2,
    /// `Delta' = diag(q, p)`.
    pub delta: RectMatrix,
    pub identity: RectMatrix,
    pub ones: RectMatrix,
    pub radicand: Rational,
}

pub fn generators(p: &Rational) -> Result<Generators> {
    check_p(p)?;
    let q = Rational::one() - p;
    let r = p / &q;
    let z = Rational::zero;
    let o = Rational::one;
    let a = RectMatrix::from_rows(vec![vec![o() - &r, r.clone()], vec![o(), z()]]);
    let d = RectMatrix::from_rows(vec![vec![o(), z()], vec![z(), -r.clone()]]);
    let delta = RectMatrix::from_rows(vec![vec![q.clone(), z()], vec![z(), p.clone()]]);
    let one = QuadScalar::from_rational(o(), &r)?;
    let s = QuadScalar::sqrt_of(&r)?;
    // sqrt(q/p) = (q/p) sqrt(p/q)
    let s_inv = s.scale(&(&q / p));
    let v = [[one.clone(), s], [one, s_inv.neg()]];
    Ok(Generators {
        a,
        d,
        v,
        delta,
        identity: RectMatrix::identity(2),
        ones: RectMatrix::from_fn(2, 2, |_, _| o()),
        radicand: r,
    })
}

fn lift(m: &RectMatrix, d: &Rational) -> Result<QuadMatrix2> {
    let e = |i, j| QuadScalar::from_rational(m.get(i, j).clone(), d);
    Ok([[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]])
}

fn quad_mul(x: &QuadMatrix2, y: &QuadMatrix2) -> Result<QuadMatrix2> {
    let cell = |i: usize, j: usize| -> Result<QuadScalar> {
        x[i][0].mul(&y[0][j])?.add(&x[i][1].mul(&y[1][j])?)
    };
    Ok([[cell(0, 0)?, cell(0, 1)?], [cell(1, 0)?, cell(1, 1)?]])
}

fn quad_transpose(x: &QuadMatrix2) -> QuadMatrix2 {
    [
        [x[0][0].clone(), x[1][0].clone()],
        [x[0][1].clone(), x[1][1].clone()],
    ]
}

/// Converts a 2x2 matrix to a rational one, failing if any entry is irrational.
fn quad_to_rational(x: &QuadMatrix2) -> Option<RectMatrix> {
    let mut rows = Vec::with_capacity(2);
    for row in x {
        let mut r = Vec::with_capacity(2);
        for e in row {
            r.push(e.as_rational()?.clone());
        }
        rows.push(r);
    }
    Some(RectMatrix::from_rows(rows))
}

impl Generators {
    /// `V' M V'^T`, which is rational for every diagonal `M` used here.
    pub fn conjugate(&self, m: &RectMatrix) -> Result<Option<RectMatrix>> {
        let lifted = lift(m, &self.radicand)?;
        let prod = quad_mul(&quad_mul(&self.v, &lifted)?, &quad_transpose(&self.v))?;
        Ok(quad_to_rational(&prod))
    }

    /// `V'^T Delta' V'`, exactly in `Q[sqrt(p/q)]`.
    pub fn orthonormality(&self) -> Result<QuadMatrix2> {
        let lifted = lift(&self.delta, &self.radicand)?;
        quad_mul(&quad_mul(&quad_transpose(&self.v), &lifted)?, &self.v)
    }
}

/// `F_{n-1} (x) ... (x) F_0`, so that matrix index = mask with bit `i` on factor `i`.
pub fn tensor_product(factors: &[&RectMatrix]) -> RectMatrix {
    let mut iter = factors.iter();
    let mut acc = match iter.next() {
        Some(f) => (*f).clone(),
        None => return RectMatrix::identity(1),
    };
    for f in iter {
        acc = kron(f, &acc);
    }
    acc
}

pub fn tensor_power(m: &RectMatrix, n: u32) -> RectMatrix {
    tensor_product(&vec![m; n as usize])
}

/// `(1/n) sum_j (x)_i M_{ij}` with `M_{ij} = special` if `i = j`, else `base`.
pub fn tensor_level_one(base: &RectMatrix, special: &RectMatrix, n: u32) -> RectMatrix {
    let mut acc: Option<RectMatrix> = None;
    for j in 0..n as usize {
        let factors: Vec<&RectMatrix> = (0..n as usize)
            .map(|i| if i == j { special } else { base })
            .collect();
        let term = tensor_product(&factors);
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term).expect("same shape"),
        });
    }
    acc.expect("n >= 1").scale(&(Rational::one() / int(n as i64)))
}

/// Selector for [`materialize_measure`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureMatrix {
    Delta,
    J,
    B0,
    B1,
    D0,
    D1,
    DeltaJDelta,
    DeltaB0,
    DeltaB1,
}

fn check_cube_cap(n: u32, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange("cube dimension must be >= 1".into()));
    }
    let size = 1usize.checked_shl(n).filter(|_| n < 63).unwrap_or(usize::MAX);
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }
    Ok(())
}

/// Builds one of the `2^n x 2^n` matrices by tensor products of the generators.
pub fn materialize_measure(p: &Rational, n: u32, which: MeasureMatrix, cap: usize) -> Result<RectMatrix> {
    check_cube_cap(n, cap)?;
    let g = generators(p)?;
    let diag_scale = |delta: &RectMatrix, m: &RectMatrix| {
        RectMatrix::from_fn(m.rows(), m.cols(), |x, y| delta.get(x, x) * m.get(x, y))
    };
    Ok(match which {
        MeasureMatrix::Delta => tensor_power(&g.delta, n),
        MeasureMatrix::J => tensor_power(&g.ones, n),
        MeasureMatrix::B0 => tensor_power(&g.a, n),
        MeasureMatrix::B1 => tensor_level_one(&g.a, &g.identity, n),
        MeasureMatrix::D0 => tensor_power(&g.d, n),
        MeasureMatrix::D1 => tensor_level_one(&g.d, &g.identity, n),
        MeasureMatrix::DeltaJDelta => {
            let dl = tensor_power(&g.delta, n);
            let j = tensor_power(&g.ones, n);
            dl.mul(&j)?.mul(&dl)?
        }
        MeasureMatrix::DeltaB0 => diag_scale(&tensor_power(&g.delta, n), &tensor_power(&g.a, n)),
        MeasureMatrix::DeltaB1 => diag_scale(
            &tensor_power(&g.delta, n),
            &tensor_level_one(&g.a, &g.identity, n),
        ),
    })
}

/// Closed-form `(B_0)_{x,y}`.
pub fn b0_entry(p: &Rational, n: u32, x: u64, y: u64) -> Rational {
    if x & y != 0 {
        return Rational::zero();
    }
    let r = p / (Rational::one() - p);
    let (sx, sy) = (x.count_ones() as usize, y.count_ones() as usize);
    pow(&(Rational::one() - &r), n as usize - sx - sy) * pow(&r, sy)
}

/// Closed-form `(B_1)_{x,y}`.
pub fn b1_entry(p: &Rational, n: u32, x: u64, y: u64) -> Rational {
    let r = p / (Rational::one() - p);
    let one_minus = Rational::one() - &r;
    let (sx, sy) = (x.count_ones() as i64, y.count_ones() as i64);
    let n = n as i64;
    match (x & y).count_ones() {
        0 if sx + sy < n => {
            int(n - sx - sy) / int(n)
                * pow(&one_minus, (n - 1 - sx - sy) as usize)
                * pow(&r, sy as usize)
        }
        1 => pow(&one_minus, (n + 1 - sx - sy) as usize) * pow(&r, (sy - 1) as usize) / int(n),
        _ => Rational::zero(),
    }
}

/// One checked item of the matrix-fact list.
#[derive(Clone, Debug, Serialize)]
pub struct FactItem {
    pub item: u8,
    pub description: &'static str,
    pub passed: bool,
    /// An offending `(x, y)` pair of masks, when one exists.
    pub offending: Option<(u64, u64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fact31Report {
    pub n: u32,
    #[serde(with = "crate::exactnum::ratstr")]
    pub p: Rational,
    pub items: Vec<FactItem>,
}

impl Fact31Report {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }
}

fn first_mismatch(a: &RectMatrix, b: &RectMatrix) -> Option<(u64, u64)> {
    (0..a.rows())
        .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| a.get(i, j) != b.get(i, j))
        .map(|(i, j)| (i as u64, j as u64))
}

/// The first pair with `|x cap y| <= 1` where `eps0 Delta B_0 + eps1 Delta B_1`
/// is not strictly positive.
pub fn positivity_violation(
    delta_b0: &RectMatrix,
    delta_b1: &RectMatrix,
    eps0: &Rational,
    eps1: &Rational,
) -> Option<(u64, u64)> {
    let dim = delta_b0.rows();
    for x in 0..dim {
        for y in 0..dim {
            if ((x & y) as u64).count_ones() > 1 {
                continue;
            }
            let e = eps0 * delta_b0.get(x, y) + eps1 * delta_b1.get(x, y);
            if !e.is_positive() {
                return Some((x as u64, y as u64));
            }
        }
    }
    None
}

/// Checks items (1)-(7) exactly for the given `p` and `n`.
pub fn verify_fact31(p: &Rational, n: u32, cap: usize) -> Result<Fact31Report> {
    check_cube_cap(n, cap)?;
    let g = generators(p)?;
    let dim = 1usize << n;
    let delta = tensor_power(&g.delta, n);
    let j = tensor_power(&g.ones, n);
    let b0 = tensor_power(&g.a, n);
    let b1 = tensor_level_one(&g.a, &g.identity, n);
    let d0 = tensor_power(&g.d, n);
    let d1 = tensor_level_one(&g.d, &g.identity, n);
    let djd = delta.mul(&j)?.mul(&delta)?;
    let db0 = delta.mul(&b0)?;
    let db1 = delta.mul(&b1)?;
    let mut items = Vec::with_capacity(7);

    // (1) symmetry
    let asym = [&delta, &djd, &db0, &db1]
        .iter()
        .find_map(|m| m.asymmetry())
        .map(|(i, j)| (i as u64, j as u64));
    items.push(FactItem {
        item: 1,
        description: "Delta, Delta J Delta, Delta B0, Delta B1 are symmetric",
        passed: asym.is_none(),
        offending: asym,
    });

    // (2) V'^T Delta' V' = I' in Q[sqrt(p/q)], and Delta J Delta = Delta (V E V^T) Delta
    let ortho = g.orthonormality()?;
    let ortho_ok = (0..2).all(|a| {
        (0..2).all(|b| ortho[a][b].as_rational() == Some(&if a == b { Rational::one() } else { Rational::zero() }))
    });
    let e_prime = RectMatrix::from_rows(vec![vec![int(1), int(0)], vec![int(0), int(0)]]);
    let sandwich = |k: &RectMatrix| delta.mul(k).and_then(|m| m.mul(&delta));
    let (item2_ok, item2_bad) = match g.conjugate(&e_prime)? {
        Some(f) => {
            let k_j = tensor_power(&f, n);
            let bad = first_mismatch(&sandwich(&k_j)?, &djd);
            (ortho_ok && bad.is_none(), bad)
        }
        None => (false, None),
    };
    items.push(FactItem {
        item: 2,
        description: "V^T Delta V = I and V^T (Delta J Delta) V = E_00",
        passed: item2_ok,
        offending: item2_bad,
    });

    // (3) Delta B_i = Delta (V D_i V^T) Delta
    let conj_d = g.conjugate(&g.d)?;
    let conj_i = g.conjugate(&g.identity)?;
    let (item3_ok, item3_bad) = match (conj_d, conj_i) {
        (Some(vd), Some(vi)) => {
            let k0 = tensor_power(&vd, n);
            let k1 = tensor_level_one(&vd, &vi, n);
            let (s0, s1) = (sandwich(&k0)?, sandwich(&k1)?);
            let bad = first_mismatch(&s0, &db0).or_else(|| first_mismatch(&s1, &db1));
            (bad.is_none(), bad)
        }
        _ => (false, None),
    };
    items.push(FactItem {
        item: 3,
        description: "V^T (Delta B_i) V = D_i",
        passed: item3_ok,
        offending: item3_bad,
    });

    // (4) D_i diagonal with entries lambda_i(|x|)
    let mut bad4 = None;
    'outer: for x in 0..dim {
        for y in 0..dim {
            for (i, d) in [(0u32, &d0), (1, &d1)] {
                let expect = if x == y {
                    lambda_measure(p, n, (x as u64).count_ones(), i)?
                } else {
                    Rational::zero()
                };
                if d.get(x, y) != &expect {
                    bad4 = Some((x as u64, y as u64));
                    break 'outer;
                }
            }
        }
    }
    items.push(FactItem {
        item: 4,
        description: "(D_i)_{x,x} = lambda_i(|x|)",
        passed: bad4.is_none(),
        offending: bad4,
    });

    // (5), (6) closed-form entries
    let closed_mismatch = |m: &RectMatrix, f: &dyn Fn(u64, u64) -> Rational| {
        (0..dim as u64)
            .flat_map(|x| (0..dim as u64).map(move |y| (x, y)))
            .find(|&(x, y)| m.get(x as usize, y as usize) != &f(x, y))
    };
    let bad5 = closed_mismatch(&b0, &|x, y| b0_entry(p, n, x, y));
    items.push(FactItem {
        item: 5,
        description: "closed form of (B_0)_{x,y}",
        passed: bad5.is_none(),
        offending: bad5,
    });
    let bad6 = closed_mismatch(&b1, &|x, y| b1_entry(p, n, x, y));
    items.push(FactItem {
        item: 6,
        description: "closed form of (B_1)_{x,y}",
        passed: bad6.is_none(),
        offending: bad6,
    });

    // (7) strict positivity on |x cap y| <= 1 for sampled eps0, eps1 > 0
    let samples = [(int(1), int(1)), (Rational::new(BigInt::from(1), BigInt::from(1000)), int(1)), (int(1), Rational::new(BigInt::from(1), BigInt::from(1000)))];
    let bad7 = samples
        .iter()
        .find_map(|(e0, e1)| positivity_violation(&db0, &db1, e0, e1));
    items.push(FactItem {
        item: 7,
        description: "eps0 Delta B0 + eps1 Delta B1 > 0 where |x cap y| <= 1",
        passed: bad7.is_none(),
        offending: bad7,
    });

    Ok(Fact31Report {
        n,
        p: p.clone(),
        items,
    })
}
