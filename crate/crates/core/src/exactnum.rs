//! Exact scalars: big rationals, binomial coefficients, and the quadratic
//! extension `Q[sqrt(d)]` used by the biased-cube eigenvector matrix.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Arbitrary-precision exact rational, always kept in lowest terms.
pub type Rational = BigRational;

/// `n/d` as a rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Binomial coefficient `C(n, r)`, zero whenever `r < 0`, `r > n` or `n < 0`.
pub fn binom(n: i64, r: i64) -> BigInt {
    if n < 0 || r < 0 || r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, r)` lifted to a rational.
pub fn binom_q(n: i64, r: i64) -> Rational {
    Rational::from_integer(binom(n, r))
}

/// `base^exp` for a non-negative exponent.
pub fn pow(base: &Rational, exp: usize) -> Rational {
    num_traits::pow(base.clone(), exp)
}

/// `(-1)^j` as a rational.
pub fn sign_pow(j: i64) -> Rational {
    if j.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Formats a rational as `"num/den"`, including integers (`"3/1"`).
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"num/den"` or a plain integer. Decimals are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = || Error::ParseRational(s.to_string());
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| err())?;
    let den = BigInt::from_str(den).map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(num, den))
}

/// Exact square root of a non-negative rational, if it is a rational square.
pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(Rational::new(sn, sd))
    } else {
        None
    }
}

/// Serde adapter storing a [`Rational`] as a `"num/den"` string.
pub mod ratstr {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(x) => s.serialize_str(&format_rational(x)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            let s = Option::<String>::deserialize(d)?;
            s.map(|s| parse_rational(&s).map_err(D::Error::custom))
                .transpose()
        }
    }
}

/// An element `a + b*sqrt(d)` of `Q[sqrt(d)]` for a fixed radicand `d > 0`.
///
/// When `d` is itself a rational square the value is folded into `a`, so `b`
/// is always zero in that case and equality stays componentwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QuadScalar {
    #[serde(rename = "rational", with = "ratstr")]
    pub a: Rational,
    #[serde(rename = "sqrt_coeff", with = "ratstr")]
    pub b: Rational,
    #[serde(rename = "radicand", with = "ratstr")]
    d: Rational,
}

impl QuadScalar {
    pub fn new(a: Rational, b: Rational, d: Rational) -> Result<Self> {
        if !d.is_positive() {
            return Err(Error::InvalidRadicand(format_rational(&d)));
        }
        Ok(match rational_sqrt(&d) {
            Some(root) => QuadScalar {
                a: a + b * root,
                b: Rational::zero(),
                d,
            },
            None => QuadScalar { a, b, d },
        })
    }

    /// Embeds a rational into `Q[sqrt(d)]`.
    pub fn from_rational(a: Rational, d: &Rational) -> Result<Self> {
        Self::new(a, Rational::zero(), d.clone())
    }

    /// The generator `sqrt(d)` itself.
    pub fn sqrt_of(d: &Rational) -> Result<Self> {
        Self::new(Rational::zero(), Rational::one(), d.clone())
    }

    pub fn radicand(&self) -> &Rational {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// The rational value, if the irrational part vanishes.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.b.is_zero().then_some(&self.a)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::RadicandMismatch {
                left: format_rational(&self.d),
                right: format_rational(&other.d),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(QuadScalar {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            d: self.d.clone(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(QuadScalar {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
            d: self.d.clone(),
        })
    }

    /// Exact product in `Q[sqrt(d)]`; both operands must share the radicand.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(QuadScalar {
            a: &self.a * &other.a + &self.b * &other.b * &self.d,
            b: &self.a * &other.b + &self.b * &other.a,
            d: self.d.clone(),
        })
    }

    pub fn neg(&self) -> Self {
        QuadScalar {
            a: -&self.a,
            b: -&self.b,
            d: self.d.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QuadScalar {
            a: &self.a * c,
            b: &self.b * c,
            d: self.d.clone(),
        }
    }

    /// Sign of the real number `a + b*sqrt(d)`: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sa == sb || sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        // opposite signs: compare a^2 with b^2 d
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * &self.d;
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
            std::cmp::Ordering::Equal => 0,
        }
    }
}

fn sign_of(x: &Rational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Display for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + {}*sqrt({})",
            format_rational(&self.a),
            format_rational(&self.b),
            format_rational(&self.d)
        )
    }
}
