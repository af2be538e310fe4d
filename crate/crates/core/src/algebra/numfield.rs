//! Real algebraic numbers in a simple extension `Q(α)`.
//!
//! A generator is a real root `α` of a square-free rational polynomial, fixed by
//! an isolating interval `(lo, hi]`. Field elements are polynomials in `α`
//! reduced modulo the defining polynomial. Zero tests are exact (gcd + Sturm);
//! signs come from interval refinement once the element is known to be nonzero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rat::{self, Rat};
use super::unipoly::UniPoly;
use super::AlgebraError;

#[derive(Clone, Debug)]
pub struct Generator {
    minpoly: UniPoly,
    lo: Rat,
    hi: Rat,
    label: String,
    /// Interval of width 2⁻⁶⁰ used for float approximation.
    fine: OnceLock<(Rat, Rat)>,
}

impl PartialEq for Generator {
    fn eq(&self, o: &Self) -> bool {
        self.minpoly == o.minpoly && self.lo == o.lo && self.hi == o.hi && self.label == o.label
    }
}

impl Eq for Generator {}

impl Generator {
    /// `poly` must be square-free with exactly one root in `(lo, hi]`.
    pub fn new(poly: UniPoly, lo: Rat, hi: Rat, label: impl Into<String>) -> Result<Self, AlgebraError> {
        let sf = poly.monic();
        if sf.degree().unwrap_or(0) < 1 || sf.square_free_part().degree() != sf.degree() {
            return Err(AlgebraError::BadGenerator("defining polynomial must be square-free".into()));
        }
        if sf.count_roots_in(&lo, &hi) != 1 {
            return Err(AlgebraError::BadGenerator("interval must isolate exactly one root".into()));
        }
        Ok(Generator {
            minpoly: sf,
            lo,
            hi,
            label: label.into(),
            fine: OnceLock::new(),
        })
    }

    pub fn minpoly(&self) -> &UniPoly {
        &self.minpoly
    }

    pub fn interval(&self) -> (&Rat, &Rat) {
        (&self.lo, &self.hi)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// An isolating interval no wider than `width`.
    pub fn refined(&self, width: &Rat) -> (Rat, Rat) {
        let (mut lo, mut hi) = (self.lo.clone(), self.hi.clone());
        let two = rat::int(2);
        while &hi - &lo > *width {
            let mid = (&lo + &hi) / &two;
            if self.minpoly.eval(&mid).is_zero() {
                return (mid.clone(), mid);
            }
            if self.minpoly.count_roots_in(&lo, &mid) == 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo, hi)
    }

    fn fine(&self) -> &(Rat, Rat) {
        self.fine.get_or_init(|| self.refined(&rat::rat(1, 1 << 60)))
    }

    pub fn approx(&self) -> f64 {
        let (lo, hi) = self.fine();
        rat::to_f64(&((lo + hi) / rat::int(2)))
    }
}

/// An element of `Q` or of `Q(α)` for a single real generator.
#[derive(Clone, Debug)]
pub struct AlgNum {
    field: Option<Arc<Generator>>,
    repr: UniPoly,
}

impl AlgNum {
    pub fn from_rat(r: Rat) -> Self {
        AlgNum {
            field: None,
            repr: UniPoly::constant(r),
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rat(rat::int(v))
    }

    pub fn generator(g: Arc<Generator>) -> Self {
        let repr = UniPoly::x().rem(g.minpoly());
        AlgNum {
            field: Some(g),
            repr,
        }
    }

    /// Polynomial expression `p(α)`.
    pub fn from_poly(g: Arc<Generator>, p: &UniPoly) -> Self {
        AlgNum {
            repr: p.rem(g.minpoly()),
            field: Some(g),
        }
    }

    /// `√r` for a nonnegative rational. Perfect squares stay rational; otherwise
    /// the result is `c·√d` with `d` a square-free integer, so square roots of
    /// rationals sharing `d` land in the same field.
    pub fn sqrt(r: &Rat) -> Result<Self, AlgebraError> {
        if r.is_negative() {
            return Err(AlgebraError::BadGenerator(format!("square root of negative {}", rat::to_string(r))));
        }
        if r.is_zero() {
            return Ok(Self::from_int(0));
        }
        // √(p/q) = √(p·q)/q
        let pq: BigInt = r.numer() * r.denom();
        let (c, d) = split_square(&pq);
        let coef = Rat::new(c, r.denom().clone());
        if d.is_one() {
            return Ok(Self::from_rat(coef));
        }
        let g = Arc::new(sqrt_generator(&d));
        Ok(&Self::generator(g) * &Self::from_rat(coef))
    }

    pub fn field(&self) -> Option<&Arc<Generator>> {
        self.field.as_ref()
    }

    pub fn repr(&self) -> &UniPoly {
        &self.repr
    }

    pub fn as_rat(&self) -> Option<Rat> {
        if self.repr.degree().unwrap_or(0) == 0 {
            Some(self.repr.coeff(0))
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rat().is_some()
    }

    pub fn is_zero(&self) -> bool {
        if let Some(r) = self.as_rat() {
            return r.is_zero();
        }
        let g = self.field.as_ref().expect("irrational element has a field");
        let common = UniPoly::gcd(&self.repr, g.minpoly());
        common.degree().unwrap_or(0) > 0 && common.count_roots_in(&g.lo, &g.hi) == 1
    }

    pub fn sign(&self) -> i32 {
        if let Some(r) = self.as_rat() {
            return rat::sign(&r);
        }
        if self.is_zero() {
            return 0;
        }
        let g = self.field.as_ref().expect("irrational element has a field");
        let mut width = &g.hi - &g.lo;
        loop {
            let (lo, hi) = g.refined(&width);
            if lo == hi {
                return rat::sign(&self.repr.eval(&lo));
            }
            let (a, b) = self.repr.eval_interval(&lo, &hi);
            if a.is_positive() {
                return 1;
            }
            if b.is_negative() {
                return -1;
            }
            width /= rat::int(16);
        }
    }

    pub fn to_f64(&self) -> f64 {
        match (&self.field, self.as_rat()) {
            (_, Some(r)) => rat::to_f64(&r),
            (Some(g), None) => {
                let (lo, hi) = g.fine();
                rat::to_f64(&self.repr.eval(&((lo + hi) / rat::int(2))))
            }
            (None, None) => unreachable!("rational elements have degree zero"),
        }
    }

    /// Multiplicative inverse. The defining polynomial may be reducible: the
    /// inverse is taken modulo the factor coprime to the representative, which
    /// still vanishes at the generator.
    pub fn inv(&self) -> Result<Self, AlgebraError> {
        if let Some(r) = self.as_rat() {
            if r.is_zero() {
                return Err(AlgebraError::DivisionByZero);
            }
            return Ok(Self::from_rat(Rat::one() / r));
        }
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let g = self.field.clone().expect("irrational element has a field");
        let common = UniPoly::gcd(&self.repr, g.minpoly());
        let modulus = g.minpoly().div_rem(&common).0;
        let (d, s) = half_xgcd(&self.repr, &modulus);
        debug_assert_eq!(d.degree(), Some(0));
        let s = s.scale(&(Rat::one() / d.coeff(0)));
        Ok(Self::from_poly(g, &s))
    }

    pub fn div(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(self * &o.inv()?)
    }

    /// Parses `p/q`, integers, decimals, and square roots written `sqrt(r)`,
    /// `sqrtN`, optionally with a leading sign and a rational factor `c*sqrt(r)`.
    /// The flag reports a decimal (inexact) literal.
    pub fn parse(text: &str) -> Result<(Self, bool), AlgebraError> {
        let s = text.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest.trim()),
            None => (false, s.strip_prefix('+').unwrap_or(s).trim()),
        };
        if let Some(pos) = body.find("sqrt") {
            let (coef_text, root_text) = body.split_at(pos);
            let coef_text = coef_text.trim().trim_end_matches('*').trim();
            let (coef, inexact_c) = if coef_text.is_empty() {
                (Rat::one(), false)
            } else {
                rat::parse(coef_text)?
            };
            let arg = root_text["sqrt".len()..].trim();
            let arg = arg
                .strip_prefix('(')
                .and_then(|a| a.strip_suffix(')'))
                .unwrap_or(arg);
            let (radicand, inexact_r) = rat::parse(arg)?;
            let v = &Self::sqrt(&radicand)? * &Self::from_rat(coef);
            return Ok((if neg { -&v } else { v }, inexact_c || inexact_r));
        }
        let (r, inexact) = rat::parse(body)?;
        Ok((Self::from_rat(if neg { -r } else { r }), inexact))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::from_int(1), |acc, _| &acc * self)
    }

    fn join(a: &Self, b: &Self) -> Option<Arc<Generator>> {
        match (&a.field, &b.field) {
            (None, None) => None,
            (Some(f), None) | (None, Some(f)) => Some(f.clone()),
            (Some(f), Some(g)) => {
                assert!(Arc::ptr_eq(f, g) || f == g, "elements of different number fields");
                Some(f.clone())
            }
        }
    }

    /// Whether two numbers can be combined (same generator or rational).
    pub fn compatible(a: &Self, b: &Self) -> bool {
        match (&a.field, &b.field) {
            (Some(f), Some(g)) => Arc::ptr_eq(f, g) || f == g,
            _ => true,
        }
    }

    fn wrap(field: Option<Arc<Generator>>, repr: UniPoly) -> Self {
        match field {
            Some(g) => Self::from_poly(g, &repr),
            None => AlgNum { field: None, repr },
        }
    }
}

/// `n = c²·d` with `d` square-free (by trial division; inputs here are small).
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut c = BigInt::one();
    let mut d = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let pp = &p * &p;
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            c *= &p;
        }
        if (&rest % &p).is_zero() {
            rest /= &p;
            d *= &p;
        }
        p += 1;
    }
    d *= rest;
    (c, d)
}

fn sqrt_generator(d: &BigInt) -> Generator {
    let s = d.sqrt();
    let poly = UniPoly::new(vec![-Rat::from_integer(d.clone()), Rat::zero(), Rat::one()]);
    Generator::new(
        poly,
        Rat::from_integer(s.clone()),
        Rat::from_integer(s + 1),
        format!("sqrt({d})"),
    )
    .expect("sqrt of a square-free integer is isolated between consecutive integers")
}

/// Returns `(gcd, s)` with `s·a ≡ gcd (mod b)`.
fn half_xgcd(a: &UniPoly, b: &UniPoly) -> (UniPoly, UniPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (UniPoly::constant(Rat::one()), UniPoly::zero());
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        let s = &s0 - &(&q * &s1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    (r0, s0)
}

impl Add for &AlgNum {
    type Output = AlgNum;
    fn add(self, o: &AlgNum) -> AlgNum {
        AlgNum::wrap(AlgNum::join(self, o), &self.repr + &o.repr)
    }
}

impl Sub for &AlgNum {
    type Output = AlgNum;
    fn sub(self, o: &AlgNum) -> AlgNum {
        AlgNum::wrap(AlgNum::join(self, o), &self.repr - &o.repr)
    }
}

impl Mul for &AlgNum {
    type Output = AlgNum;
    fn mul(self, o: &AlgNum) -> AlgNum {
        AlgNum::wrap(AlgNum::join(self, o), &self.repr * &o.repr)
    }
}

impl Neg for &AlgNum {
    type Output = AlgNum;
    fn neg(self) -> AlgNum {
        AlgNum {
            field: self.field.clone(),
            repr: -&self.repr,
        }
    }
}

impl Add for AlgNum {
    type Output = AlgNum;
    fn add(self, o: AlgNum) -> AlgNum {
        &self + &o
    }
}

impl Mul for AlgNum {
    type Output = AlgNum;
    fn mul(self, o: AlgNum) -> AlgNum {
        &self * &o
    }
}

impl PartialEq for AlgNum {
    fn eq(&self, o: &Self) -> bool {
        AlgNum::compatible(self, o) && (self - o).is_zero()
    }
}

impl From<Rat> for AlgNum {
    fn from(r: Rat) -> Self {
        AlgNum::from_rat(r)
    }
}

impl fmt::Display for AlgNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(g) = self.field.as_ref().filter(|_| !self.is_rational()) else {
            return write!(f, "{}", rat::to_string(&self.repr.coeff(0)));
        };
        let mut first = true;
        for (i, c) in self.repr.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let a = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            let power = match i {
                0 => String::new(),
                1 => g.label().to_string(),
                _ => format!("{}^{i}", g.label()),
            };
            match (i, a.is_one()) {
                (0, _) => write!(f, "{}", rat::to_string(&a))?,
                (_, true) => write!(f, "{power}")?,
                _ => write!(f, "{}*{power}", rat::to_string(&a))?,
            }
        }
        Ok(())
    }
}

impl serde::Serialize for AlgNum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{int, rat};

    #[test]
    fn square_roots_share_fields() {
        let a = AlgNum::sqrt(&int(8)).unwrap();
        let b = AlgNum::sqrt(&int(2)).unwrap();
        assert!(AlgNum::compatible(&a, &b));
        assert_eq!(a, &b * &AlgNum::from_int(2));
        assert_eq!(&b * &b, AlgNum::from_int(2));
        assert!((a.to_f64() - 2.8284271247461903).abs() < 1e-15);
    }

    #[test]
    fn perfect_squares_are_rational() {
        assert_eq!(AlgNum::sqrt(&rat(9, 4)).unwrap().as_rat(), Some(rat(3, 2)));
        assert!(AlgNum::sqrt(&int(-1)).is_err());
    }

    #[test]
    fn signs_of_nearly_cancelling_elements() {
        // 99/70 is a close rational approximation of √2.
        let s = AlgNum::sqrt(&int(2)).unwrap();
        let d = &s - &AlgNum::from_rat(rat(99, 70));
        assert_eq!(d.sign(), -1);
        let d = &s - &AlgNum::from_rat(rat(140, 99));
        assert_eq!(d.sign(), 1);
    }

    #[test]
    fn parse_and_display() {
        let (v, inexact) = AlgNum::parse("sqrt8").unwrap();
        assert!(!inexact);
        assert_eq!(v.to_string(), "2*sqrt(2)");
        let (v, _) = AlgNum::parse("-3/2*sqrt(2)").unwrap();
        assert!((v.to_f64() + 2.1213203435596424).abs() < 1e-15);
        assert_eq!(AlgNum::parse("-105/4").unwrap().0.to_string(), "-105/4");
        assert!(AlgNum::parse("0.5").unwrap().1);
    }

    #[test]
    fn inverse_with_reducible_generator() {
        let p = &UniPoly::from_ints(&[-2, 0, 1]) * &UniPoly::from_ints(&[-5, 1]);
        let g = Arc::new(Generator::new(p, int(1), int(2), "a").unwrap());
        let a = AlgNum::generator(g);
        // a - 5 vanishes at the other root but not at a = √2.
        let x = &a - &AlgNum::from_int(5);
        assert_eq!(&x * &x.inv().unwrap(), AlgNum::from_int(1));
        let y = &(&a * &a) - &AlgNum::from_int(2);
        assert!(y.inv().is_err());
    }

    #[test]
    fn inverse() {
        let s = AlgNum::sqrt(&int(2)).unwrap();
        let x = &s + &AlgNum::from_int(1);
        assert_eq!(&x * &x.inv().unwrap(), AlgNum::from_int(1));
    }

    #[test]
    fn non_minimal_generator_zero_test() {
        // α = √2 as a root of (x² − 2)(x − 5); the element α − 5 is nonzero.
        let p = &UniPoly::from_ints(&[-2, 0, 1]) * &UniPoly::from_ints(&[-5, 1]);
        let g = Arc::new(Generator::new(p, int(1), int(2), "a").unwrap());
        let a = AlgNum::generator(g);
        assert!(!(&a - &AlgNum::from_int(5)).is_zero());
        assert!((&(&a * &a) - &AlgNum::from_int(2)).is_zero());
    }
}
