//! Exact rational scalars.
//!
//! `Rat` is `num_rational::BigRational`, which keeps every value reduced with a
//! positive denominator. This module adds parsing and conversions used across
//! the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &Rat) -> f64 {
    // BigRational::to_f64 handles huge numerators/denominators gracefully.
    r.to_f64().unwrap_or_else(|| {
        if r.is_positive() {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    })
}

/// Exact conversion of a finite float into a rational.
pub fn from_f64(v: f64) -> Option<Rat> {
    Rat::from_float(v)
}

/// Parses `"p/q"`, an integer, or a decimal literal such as `-2.25` exactly.
///
/// Returns the value and whether the literal was a decimal/float (inexact input).
pub fn parse(text: &str) -> Result<(Rat, bool), AlgebraError> {
    let s = text.trim();
    let bad = || AlgebraError::Parse(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a.trim().parse().map_err(|_| bad())?;
        let den: BigInt = b.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok((Rat::new(num, den), false));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Ok((Rat::from_integer(i), false));
    }
    let v: f64 = s.parse().map_err(|_| bad())?;
    if !v.is_finite() {
        return Err(bad());
    }
    // Decimal literals are read exactly in base ten when they have no exponent.
    if !s.contains(['e', 'E']) {
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        if let Some((ip, fp)) = body.split_once('.') {
            let digits = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp);
            if let Ok(n) = digits.parse::<BigInt>() {
                let den = num_traits::pow(BigInt::from(10), fp.len());
                let r = Rat::new(n, den);
                return Ok((if neg { -r } else { r }, true));
            }
        }
    }
    Ok((from_f64(v).ok_or_else(bad)?, true))
}

pub fn to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Serde adapter storing rationals as `"p/q"` strings.
pub mod serde_rat {
    use super::Rat;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let text = String::deserialize(d)?;
        super::parse(&text)
            .map(|(r, _)| r)
            .map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for fixed arrays of rationals.
pub mod serde_rat_array {
    use super::Rat;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(v: &[Rat; N], s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(super::to_string).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[Rat; N], D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        if strings.len() != N {
            return Err(serde::de::Error::custom(format!(
                "expected {N} coefficients, found {}",
                strings.len()
            )));
        }
        let mut out: Vec<Rat> = Vec::with_capacity(N);
        for t in &strings {
            out.push(super::parse(t).map(|(r, _)| r).map_err(serde::de::Error::custom)?);
        }
        out.try_into()
            .map_err(|_| serde::de::Error::custom("coefficient count"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse("-105/4").unwrap(), (rat(-105, 4), false));
        assert_eq!(parse("12").unwrap(), (int(12), false));
        assert_eq!(parse("-2.25").unwrap(), (rat(-9, 4), true));
        assert_eq!(parse("0.1").unwrap(), (rat(1, 10), true));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
    }

    #[test]
    fn display_round_trip() {
        assert_eq!(to_string(&rat(-49, 2)), "-49/2");
        assert_eq!(to_string(&int(3)), "3");
    }
}
