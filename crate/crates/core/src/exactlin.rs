//! Dense exact-rational matrices.
//!
//! [`SymMatrix`] keeps only the upper triangle, so symmetry holds by
//! construction. [`psd_check_exact`] decides positive semidefiniteness by
//! diagonal-pivoted symmetric elimination and returns either the pivots or a
//! vector `w` with `w^T M w < 0`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMatrix {
    dim: usize,
    upper: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

fn packed(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // row i of the upper triangle starts after i rows of decreasing length
    i * dim - i * (i + 1) / 2 + j
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            upper: vec![Rational::zero(); dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    /// The all-ones matrix `J`.
    pub fn ones(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| Rational::one())
    }

    /// Builds a matrix from `f(i, j)`, evaluated only for `i <= j`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut upper = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in i..dim {
                upper.push(f(i, j));
            }
        }
        SymMatrix { dim, upper }
    }

    /// `[[a, b], [b^T, c]]`.
    pub fn from_blocks(a: &SymMatrix, b: &RectMatrix, c: &SymMatrix) -> Result<Self> {
        if b.rows != a.dim || b.cols != c.dim {
            return Err(Error::DimensionMismatch(format!(
                "blocks {}x{}, {}x{}, {}x{}",
                a.dim, a.dim, b.rows, b.cols, c.dim, c.dim
            )));
        }
        let n = a.dim;
        Ok(Self::from_fn(a.dim + c.dim, |i, j| match (i < n, j < n) {
            (true, true) => a.get(i, j).clone(),
            (true, false) => b.get(i, j - n).clone(),
            (false, true) => b.get(j, i - n).clone(),
            (false, false) => c.get(i - n, j - n).clone(),
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.upper[packed(self.dim, i, j)]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        let k = packed(self.dim, i, j);
        self.upper[k] = v;
    }

    pub fn scale(&self, c: &Rational) -> Self {
        SymMatrix {
            dim: self.dim,
            upper: self.upper.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &SymMatrix) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &SymMatrix, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        Ok(SymMatrix {
            dim: self.dim,
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn to_rect(&self) -> RectMatrix {
        RectMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j).clone())
    }

    /// `x^T M y`.
    pub fn bilinear(&self, x: &[Rational], y: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let mut acc = Rational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let mut row = Rational::zero();
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    row += self.get(i, j) * yj;
                }
            }
            acc += xi * row;
        }
        acc
    }

    pub fn quad_form(&self, x: &[Rational]) -> Rational {
        self.bilinear(x, x)
    }

    pub fn iter_upper(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        let dim = self.dim;
        (0..dim)
            .flat_map(move |i| (i..dim).map(move |j| (i, j)))
            .zip(&self.upper)
            .map(|((i, j), v)| (i, j, v))
    }

    pub fn to_json(&self) -> Value {
        self.to_rect().to_json()
    }
}

impl RectMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RectMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, dim, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RectMatrix { rows, cols, data }
    }

    /// Row-major construction; panics if `rows` is ragged.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RectMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RectMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &RectMatrix) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(RectMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &RectMatrix) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    /// Entries scaled to integers by the lcm of the denominators.
    fn integer_form(&self) -> (Vec<BigInt>, BigInt) {
        let lcm = self
            .data
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints = self
            .data
            .iter()
            .map(|x| x.numer() * (&lcm / x.denom()))
            .collect();
        (ints, lcm)
    }

    /// Exact product, computed over the integers after clearing denominators.
    pub fn mul(&self, other: &RectMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (a, la) = self.integer_form();
        let (b, lb) = other.integer_form();
        let denom = la * lb;
        let (n, m, p) = (self.rows, self.cols, other.cols);
        let mut out = vec![BigInt::zero(); n * p];
        for i in 0..n {
            let row = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let aik = &a[i * m + k];
                if aik.is_zero() {
                    continue;
                }
                for (j, slot) in row.iter_mut().enumerate() {
                    let bkj = &b[k * p + j];
                    if !bkj.is_zero() {
                        *slot += aik * bkj;
                    }
                }
            }
        }
        Ok(RectMatrix {
            rows: n,
            cols: p,
            data: out
                .into_iter()
                .map(|x| Rational::new(x, denom.clone()))
                .collect(),
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// The first `(i, j)` with `M[i][j] != M[j][i]`, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        (0..self.rows)
            .flat_map(|i| (i + 1..self.cols).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != self.get(j, i))
    }

    pub fn to_sym(&self) -> Result<SymMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} is not square",
                self.rows, self.cols
            )));
        }
        if let Some((i, j)) = self.asymmetry() {
            return Err(Error::DimensionMismatch(format!("not symmetric at ({i}, {j})")));
        }
        Ok(SymMatrix::from_fn(self.rows, |i, j| self.get(i, j).clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| {
                    Value::Array(
                        (0..self.cols)
                            .map(|j| Value::String(format_rational(self.get(i, j))))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

/// Kronecker product; row `(ra, rb)` maps to `ra * b.rows() + rb`.
pub fn kron(a: &RectMatrix, b: &RectMatrix) -> RectMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    RectMatrix::from_fn(rows, cols, |r, c| {
        let (ra, rb) = (r / b.rows, r % b.rows);
        let (ca, cb) = (c / b.cols, c % b.cols);
        a.get(ra, ca) * b.get(rb, cb)
    })
}

/// Trace inner product `A . B = sum_ij A_ij B_ij`.
pub fn trace_inner(a: &SymMatrix, b: &SymMatrix) -> Result<Rational> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(format!("{} vs {}", a.dim, b.dim)));
    }
    let mut acc = Rational::zero();
    for (i, j, x) in a.iter_upper() {
        let y = b.get(i, j);
        if x.is_zero() || y.is_zero() {
            continue;
        }
        if i == j {
            acc += x * y;
        } else {
            acc += x * y * Rational::from_integer(BigInt::from(2));
        }
    }
    Ok(acc)
}

/// `trace(M^m)`, with `trace(M^0) = dim`.
pub fn trace_power(m: &SymMatrix, power: u32) -> Rational {
    let dim = m.dim;
    match power {
        0 => Rational::from_integer(BigInt::from(dim)),
        1 => (0..dim).map(|i| m.get(i, i).clone()).sum(),
        2 => trace_inner(m, m).expect("same dim"),
        _ => {
            let rect = m.to_rect();
            let mut acc = rect.clone();
            for _ in 0..power - 2 {
                acc = acc.mul(&rect).expect("square");
            }
            // trace(M^(p-1) M) = sum_ij (M^(p-1))_ij M_ji
            let mut tr = Rational::zero();
            for i in 0..dim {
                for j in 0..dim {
                    let x = acc.get(i, j);
                    if !x.is_zero() {
                        tr += x * m.get(j, i);
                    }
                }
            }
            tr
        }
    }
}

/// Outcome of [`psd_check_exact`].
#[derive(Clone, Debug)]
pub struct PsdVerdict {
    pub is_psd: bool,
    /// Pivots in elimination order; complete (length `dim`) when PSD.
    pub pivots: Vec<Rational>,
    /// A vector `w` with `w^T M w < 0`, when not PSD.
    pub witness: Option<Vec<Rational>>,
    /// The exact value `w^T M w` of the witness.
    pub witness_value: Option<Rational>,
}

struct EliminationStep {
    pivot: usize,
    value: Rational,
    row: Vec<(usize, Rational)>,
}

/// Decides `M >= 0` exactly by diagonal-pivoted symmetric elimination.
///
/// At every step the largest remaining diagonal entry is the pivot. A negative
/// maximum, or a zero maximum next to a nonzero off-diagonal entry, yields a
/// witness on the reduced block that is lifted back through the recorded
/// elimination steps.
pub fn psd_check_exact(m: &SymMatrix) -> PsdVerdict {
    let n = m.dim;
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).clone()).collect())
        .collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut steps: Vec<EliminationStep> = Vec::with_capacity(n);
    let mut pivots = Vec::with_capacity(n);

    loop {
        if active.is_empty() {
            return PsdVerdict {
                is_psd: true,
                pivots,
                witness: None,
                witness_value: None,
            };
        }
        let mut best = active[0];
        for &i in &active[1..] {
            if a[i][i] > a[best][best] {
                best = i;
            }
        }
        let d = a[best][best].clone();

        if d.is_negative() {
            let mut y = vec![Rational::zero(); n];
            y[best] = Rational::one();
            return finish_witness(m, pivots, &steps, y);
        }

        if d.is_zero() {
            // every remaining diagonal entry is <= 0; the max is zero
            if let Some(&i) = active.iter().find(|&&i| a[i][i].is_negative()) {
                let mut y = vec![Rational::zero(); n];
                y[i] = Rational::one();
                return finish_witness(m, pivots, &steps, y);
            }
            let off = active.iter().enumerate().find_map(|(ai, &i)| {
                active[ai + 1..]
                    .iter()
                    .find(|&&j| !a[i][j].is_zero())
                    .map(|&j| (i, j))
            });
            if let Some((i, j)) = off {
                let mut y = vec![Rational::zero(); n];
                y[i] = Rational::one();
                y[j] = if a[i][j].is_positive() {
                    -Rational::one()
                } else {
                    Rational::one()
                };
                return finish_witness(m, pivots, &steps, y);
            }
            // remaining block is identically zero
            pivots.extend(active.iter().map(|_| Rational::zero()));
            return PsdVerdict {
                is_psd: true,
                pivots,
                witness: None,
                witness_value: None,
            };
        }

        active.retain(|&i| i != best);
        let row: Vec<(usize, Rational)> = active
            .iter()
            .filter(|&&j| !a[best][j].is_zero())
            .map(|&j| (j, a[best][j].clone()))
            .collect();
        for (ri, &(r, ref arp)) in row.iter().enumerate() {
            let factor = arp / &d;
            for &(s, ref aps) in &row[ri..] {
                let upd = &factor * aps;
                a[r][s] -= &upd;
                if r != s {
                    a[s][r] = a[r][s].clone();
                }
            }
        }
        pivots.push(d.clone());
        steps.push(EliminationStep {
            pivot: best,
            value: d,
            row,
        });
    }
}

fn finish_witness(
    m: &SymMatrix,
    pivots: Vec<Rational>,
    steps: &[EliminationStep],
    mut y: Vec<Rational>,
) -> PsdVerdict {
    // the Schur complement form y^T S y equals x^T M x once each eliminated
    // coordinate is chosen to minimise the form given the later ones
    for step in steps.iter().rev() {
        let s: Rational = step
            .row
            .iter()
            .filter(|(j, _)| !y[*j].is_zero())
            .map(|(j, v)| v * &y[*j])
            .sum();
        y[step.pivot] = -s / &step.value;
    }
    let value = m.quad_form(&y);
    debug_assert!(value.is_negative(), "witness must be negative");
    PsdVerdict {
        is_psd: false,
        pivots,
        witness: Some(y),
        witness_value: Some(value),
    }
}
