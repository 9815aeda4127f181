//! Exact scalars.
//!
//! Every exact quantity in the crate is a [`Rational`], an arbitrary-precision
//! fraction kept in lowest terms with a positive denominator. On the wire a
//! rational is the string `"p/q"`, or `"p"` when the denominator is one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `p / q` for machine integers. Panics on `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p: BigInt = p.trim().parse().map_err(|_| bad())?;
    let q: BigInt = q.trim().parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(p, q))
}

pub fn to_f64(x: &Rational) -> f64 {
    // Ratio<BigInt>::to_f64 handles huge numerators and denominators correctly.
    x.to_f64().unwrap_or(f64::NAN)
}

/// Rounds a finite float to the nearest multiple of `2^-53`.
///
/// The map is monotone, so sorted inputs stay sorted.
pub fn snap_f64(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::OutOfRange(format!("non-finite value {x}")));
    }
    let scale = 2f64.powi(53);
    let scaled = (x * scale).round();
    let numer = BigInt::from(scaled as i128);
    Ok(Rational::new(numer, BigInt::one() << 53usize))
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

/// `floor(x * n) / n`.
pub fn floor_to(x: &Rational, n: u64) -> Rational {
    let n = int(n as i64);
    (x * &n).floor() / n
}

pub(crate) fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

pub(crate) mod vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format_rational(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(D::Error::custom))
            .collect()
    }
}
