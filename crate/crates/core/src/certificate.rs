//! Pieces shared by the uniform and biased-cube dual certificates: the 2x2
//! block data, the exact eps1 window, and complementary-slackness values.
//!
//! Both certificates have the shape
//!
//! ```text
//! S = 1/2 [a W, -WJW; -WJW, a W] - [0, Q; Q, 0] - [P, 0; 0, P],   Z = diag(P, P)
//! ```
//!
//! with `W = I` (uniform) or `W = Delta` (measure), and `P`, `Q` in the span
//! of the two intersection matrices.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::exactlin::{psd_check_exact, SymMatrix};
use crate::exactnum::{ratstr, QuadScalar, Rational};

pub fn bigint_str<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// The 2x2 block `[[u, v], [v, u]]` at level `j`, with eigenvalues `u + v`, `u - v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub j: u32,
    #[serde(with = "ratstr")]
    pub u: Rational,
    #[serde(with = "ratstr")]
    pub v: Rational,
    #[serde(with = "ratstr")]
    pub margin_plus: Rational,
    #[serde(with = "ratstr")]
    pub margin_minus: Rational,
}

impl Block {
    pub fn new(j: u32, u: Rational, v: Rational) -> Self {
        Block {
            j,
            margin_plus: &u + &v,
            margin_minus: &u - &v,
            u,
            v,
        }
    }

    /// `u >= |v|`, i.e. the block is PSD.
    pub fn is_psd(&self) -> bool {
        !self.margin_plus.is_negative() && !self.margin_minus.is_negative()
    }

    pub fn min_margin(&self) -> &Rational {
        std::cmp::min(&self.margin_plus, &self.margin_minus)
    }
}

pub(crate) fn min_margin(blocks: &[Block]) -> Option<Rational> {
    blocks.iter().map(|b| b.min_margin().clone()).min()
}

/// A named affine condition on eps1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// `u_j + v_j >= 0`.
    Plus(u32),
    /// `u_j - v_j >= 0`.
    Minus(u32),
    /// `eps0 > 0`.
    Eps0Positive,
    /// `eps1 > 0` (uniform) or `eps1 >= 0` (measure).
    Eps1Lower,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Plus(j) => write!(f, "u{j}+v{j}>=0"),
            Constraint::Minus(j) => write!(f, "u{j}-v{j}>=0"),
            Constraint::Eps0Positive => write!(f, "eps0>0"),
            Constraint::Eps1Lower => write!(f, "eps1-lower"),
        }
    }
}

impl Serialize for Constraint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `constant + slope * eps1 >= 0` (or `> 0` when strict).
#[derive(Clone, Debug)]
pub struct AffineConstraint {
    pub label: Constraint,
    pub constant: Rational,
    pub slope: Rational,
    pub strict: bool,
}

/// The exact set of admissible eps1 values: an interval with optional ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Eps1Window {
    #[serde(with = "ratstr")]
    pub lower: Rational,
    pub lower_inclusive: bool,
    /// Supremum of admissible eps1; `None` if unbounded.
    #[serde(with = "ratstr::option")]
    pub upper: Option<Rational>,
    /// Whether `upper` itself is admissible.
    pub attained_at_upper: bool,
    /// The constraints whose bound equals `upper`.
    pub binding: Vec<Constraint>,
}

impl Eps1Window {
    /// Intersects the half-lines cut out by `constraints` with the lower end
    /// `lower` (inclusive or not). Returns `None` when the result is empty.
    pub fn solve(
        lower: Rational,
        lower_inclusive: bool,
        constraints: &[AffineConstraint],
    ) -> Option<Eps1Window> {
        let mut lo = lower;
        let mut lo_inc = lower_inclusive;
        let mut hi: Option<Rational> = None;
        let mut hi_inc = true;
        let mut binding = Vec::new();

        for c in constraints {
            if c.slope.is_zero() {
                let bad = c.constant.is_negative() || (c.strict && c.constant.is_zero());
                if bad {
                    return None;
                }
                continue;
            }
            let bound = -&c.constant / &c.slope;
            if c.slope.is_negative() {
                // eps1 <= bound
                match &hi {
                    Some(h) if &bound > h => {}
                    Some(h) if &bound == h => {
                        hi_inc &= !c.strict;
                        binding.push(c.label);
                    }
                    _ => {
                        hi = Some(bound);
                        hi_inc = !c.strict;
                        binding = vec![c.label];
                    }
                }
            } else if bound > lo {
                lo = bound;
                lo_inc = !c.strict;
            } else if bound == lo {
                lo_inc &= !c.strict;
            }
        }

        if let Some(h) = &hi {
            if h < &lo || (h == &lo && !(hi_inc && lo_inc)) {
                return None;
            }
        }
        Some(Eps1Window {
            lower: lo,
            lower_inclusive: lo_inc,
            upper: hi,
            attained_at_upper: hi_inc,
            binding,
        })
    }

    pub fn contains(&self, eps1: &Rational) -> bool {
        let above = if self.lower_inclusive {
            eps1 >= &self.lower
        } else {
            eps1 > &self.lower
        };
        let below = match &self.upper {
            None => true,
            Some(h) if self.attained_at_upper => eps1 <= h,
            Some(h) => eps1 < h,
        };
        above && below
    }

    /// Whether the window is the single point `{lower}`.
    pub fn is_point(&self) -> bool {
        self.upper.as_ref() == Some(&self.lower)
    }

    /// The midpoint of the window, or its only point.
    pub fn midpoint(&self) -> Rational {
        match &self.upper {
            Some(h) => (&self.lower + h) / Rational::from_integer(BigInt::from(2)),
            None => &self.lower + Rational::one(),
        }
    }
}

/// Complementary-slackness values of a certificate against a family pair.
///
/// `X = w w^T` with `w = [x_F / sqrt(a); x_G / sqrt(b)]`, where `a`, `b` are
/// the sizes (uniform) or measures (cube) of the two families.
#[derive(Clone, Debug, Serialize)]
pub struct SlacknessReport {
    #[serde(with = "ratstr")]
    pub size_f: Rational,
    #[serde(with = "ratstr")]
    pub size_g: Rational,
    /// `a * b`, the square of the primal objective.
    #[serde(with = "ratstr")]
    pub product: Rational,
    #[serde(with = "ratstr")]
    pub alpha_squared: Rational,
    pub s_dot_x: QuadScalar,
    #[serde(with = "ratstr")]
    pub z_dot_x: Rational,
    pub cross_intersecting: bool,
    /// `alpha - sqrt(ab) = S.X + Z.X`, exact; only meaningful for cross-intersecting pairs.
    pub duality_gap_identity: bool,
    /// Whether `Z` is strictly positive on every pair with `|x cap y| <= 1`.
    pub z_strict: bool,
}

impl SlacknessReport {
    /// `S.X = 0` and `Z.X = 0`.
    pub fn is_tight(&self) -> bool {
        self.s_dot_x.is_zero() && self.z_dot_x.is_zero()
    }

    pub fn attains_bound(&self) -> bool {
        self.product == self.alpha_squared
    }
}

/// Entry oracles for one certificate: `S11 = S22`, `S12`, and `P` (the diagonal
/// block of `Z`), each as a function of two sets.
pub(crate) struct EntryForms<'a> {
    pub weight: &'a dyn Fn(u64) -> Rational,
    pub s_diag: &'a dyn Fn(u64, u64) -> Rational,
    pub s_off: &'a dyn Fn(u64, u64) -> Rational,
    pub p: &'a dyn Fn(u64, u64) -> Rational,
}

pub(crate) fn slackness(
    forms: &EntryForms<'_>,
    alpha: &Rational,
    f: &[u64],
    g: &[u64],
    t: u32,
    z_strict: bool,
) -> SlacknessReport {
    let a: Rational = f.iter().map(|&x| (forms.weight)(x)).sum();
    let b: Rational = g.iter().map(|&x| (forms.weight)(x)).sum();
    let pair_sum = |xs: &[u64], ys: &[u64], e: &dyn Fn(u64, u64) -> Rational| -> Rational {
        let mut acc = Rational::zero();
        for &x in xs {
            for &y in ys {
                acc += e(x, y);
            }
        }
        acc
    };
    let s11 = pair_sum(f, f, forms.s_diag);
    let s22 = pair_sum(g, g, forms.s_diag);
    let s12 = pair_sum(f, g, forms.s_off);
    let z11 = pair_sum(f, f, forms.p);
    let z22 = pair_sum(g, g, forms.p);

    let ab = &a * &b;
    let nonempty = !a.is_zero() && !b.is_zero();
    let radicand = if nonempty { ab.clone() } else { Rational::one() };
    let quad = |x: Rational, y: Rational| QuadScalar::new(x, y, radicand.clone()).expect("positive radicand");
    let (s_dot_x, z_dot_x) = if nonempty {
        // 2 s12 / sqrt(ab) = (2 s12 / ab) sqrt(ab)
        let two = Rational::from_integer(BigInt::from(2));
        (
            quad(&s11 / &a + &s22 / &b, two * &s12 / &ab),
            &z11 / &a + &z22 / &b,
        )
    } else {
        (quad(Rational::zero(), Rational::zero()), Rational::zero())
    };

    let cross = f
        .iter()
        .all(|&x| g.iter().all(|&y| (x & y).count_ones() >= t));
    let gap = quad(alpha.clone(), -Rational::one());
    let rhs = quad(&s_dot_x.a + &z_dot_x, s_dot_x.b.clone());
    let identity = nonempty && gap == rhs;

    SlacknessReport {
        size_f: a,
        size_g: b,
        product: ab,
        alpha_squared: alpha * alpha,
        s_dot_x,
        z_dot_x,
        cross_intersecting: cross,
        duality_gap_identity: identity,
        z_strict,
    }
}

/// Exact checks on an assembled `S` and `Z = diag(P, P)`.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixReport {
    pub dim: usize,
    pub psd: bool,
    /// `w^T S w` for the elimination witness, when `S` is not PSD.
    #[serde(with = "ratstr::option")]
    pub witness_value: Option<Rational>,
    /// The witness re-evaluates to the same negative value.
    pub witness_valid: bool,
    /// `psd` agrees with "every block has nonnegative margins".
    pub blocks_agree: bool,
    /// The spectral trace identity for `m = 1, 2, 3`.
    pub trace_identity: [bool; 3],
    pub z_nonnegative: bool,
    /// `P_{x,y} > 0` exactly on the pairs with `|x cap y| <= 1`.
    pub z_support_exact: bool,
}

impl MatrixReport {
    /// Everything except `z_support_exact`, which needs `eps1 > 0`.
    pub fn consistent(&self) -> bool {
        self.blocks_agree
            && self.trace_identity.iter().all(|&b| b)
            && self.z_nonnegative
            && (self.psd || self.witness_valid)
    }
}

/// `sum_j mult_j ((u_j + v_j)^m + (u_j - v_j)^m)`.
pub(crate) fn block_trace(blocks: &[Block], mults: &[BigInt], m: u32) -> Rational {
    blocks
        .iter()
        .zip(mults)
        .map(|(b, k)| {
            let e = m as usize;
            Rational::from_integer(k.clone())
                * (crate::exactnum::pow(&b.margin_plus, e) + crate::exactnum::pow(&b.margin_minus, e))
        })
        .sum()
}

/// Nonnegativity of `P`, and whether its support is exactly `|x cap y| <= 1`.
pub(crate) fn p_support(p: &SymMatrix, sets: &[u64]) -> (bool, bool) {
    let mut nonneg = true;
    let mut exact = true;
    for (i, j, e) in p.iter_upper() {
        nonneg &= !e.is_negative();
        exact &= e.is_positive() == ((sets[i] & sets[j]).count_ones() <= 1);
    }
    (nonneg, exact)
}

pub(crate) fn psd_fields(s: &SymMatrix) -> (bool, Option<Rational>, bool) {
    let verdict = psd_check_exact(s);
    let valid = match (&verdict.witness, &verdict.witness_value) {
        (Some(w), Some(v)) => v.is_negative() && &s.quad_form(w) == v,
        _ => false,
    };
    (verdict.is_psd, verdict.witness_value, valid)
}
