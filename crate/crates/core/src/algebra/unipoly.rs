//! Dense univariate polynomials over the rationals, with Sturm-chain real root
//! isolation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rat::{self, Rat};
use super::AlgebraError;

/// Coefficients lowest degree first; the zero polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat::int(c)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + rat::to_f64(c))
    }

    /// Horner evaluation in rational interval arithmetic. Returns an enclosure
    /// of the range of the polynomial over `[lo, hi]`.
    pub fn eval_interval(&self, lo: &Rat, hi: &Rat) -> (Rat, Rat) {
        let mut acc = (Rat::zero(), Rat::zero());
        for c in self.coeffs.iter().rev() {
            let cands = [&acc.0 * lo, &acc.0 * hi, &acc.1 * lo, &acc.1 * hi];
            let mut mn = cands[0].clone();
            let mut mx = cands[0].clone();
            for v in &cands[1..] {
                if *v < mn {
                    mn = v.clone();
                }
                if *v > mx {
                    mx = v.clone();
                }
            }
            acc = (mn + c, mx + c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat::int(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading();
        self.scale(&(Rat::one() / lc))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.leading();
        let mut rem = self.coeffs.clone();
        let Some(sd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if sd < dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rat::zero(); sd - dd + 1];
        for i in (0..=sd - dd).rev() {
            let c = &rem[i + dd] / &lc;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] -= &c * dc;
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn square_free_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = Self::gcd(self, &self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(Rat::one()), |acc, _| &acc * self)
    }

    /// `self(q(x))`.
    pub fn compose(&self, q: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| &(&acc * q) + &Self::constant(c.clone()))
    }

    /// Standard Sturm chain `p, p', -rem(p, p'), ...`.
    pub fn sturm_chain(&self) -> Vec<Self> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(-&r);
        }
        chain
    }

    /// Cauchy bound: every real root lies strictly inside `(-B, B)`.
    pub fn root_bound(&self) -> Rat {
        let lc = self.leading().abs();
        let n = self.coeffs.len();
        let mx = self.coeffs[..n.saturating_sub(1)]
            .iter()
            .map(|c| c.abs() / &lc)
            .fold(Rat::zero(), |a, b| if b > a { b } else { a });
        mx + Rat::one()
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat::to_f64).collect()
    }
}

fn sign_changes(values: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut count = 0;
    for s in values {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn variations_at(chain: &[UniPoly], x: &Rat) -> usize {
    sign_changes(chain.iter().map(|p| rat::sign(&p.eval(x))))
}

fn variations_at_infinity(chain: &[UniPoly], positive: bool) -> usize {
    sign_changes(chain.iter().map(|p| {
        let s = rat::sign(&p.leading());
        let odd = p.degree().unwrap_or(0) % 2 == 1;
        if !positive && odd {
            -s
        } else {
            s
        }
    }))
}

/// A real root isolated in the half-open interval `(lo, hi]`, or exactly
/// known when `lo == hi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealRoot {
    #[serde(with = "rat::serde_rat")]
    pub lo: Rat,
    #[serde(with = "rat::serde_rat")]
    pub hi: Rat,
    pub multiplicity: usize,
}

impl RealRoot {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn exact_value(&self) -> Option<&Rat> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / rat::int(2)
    }

    pub fn approx(&self) -> f64 {
        rat::to_f64(&self.midpoint())
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }
}

/// Isolated real roots of a fixed polynomial, refinable on demand.
#[derive(Clone, Debug)]
pub struct RootIsolation {
    square_free: UniPoly,
    chain: Vec<UniPoly>,
    pub roots: Vec<RealRoot>,
}

impl RootIsolation {
    fn count_in(&self, lo: &Rat, hi: &Rat) -> usize {
        variations_at(&self.chain, lo) - variations_at(&self.chain, hi)
    }

    /// Bisects root `i` until its interval is narrower than `width`.
    pub fn refine(&mut self, i: usize, width: &Rat) {
        let two = rat::int(2);
        loop {
            let r = &self.roots[i];
            if r.is_exact() || r.width() <= *width {
                return;
            }
            let mid = (&r.lo + &r.hi) / &two;
            let (lo, hi) = (r.lo.clone(), r.hi.clone());
            if self.square_free.eval(&mid).is_zero() {
                self.roots[i].lo = mid.clone();
                self.roots[i].hi = mid;
            } else if self.square_free.eval(&hi).is_zero() {
                self.roots[i].lo = hi.clone();
            } else if self.count_in(&lo, &mid) == 1 {
                self.roots[i].hi = mid;
            } else {
                self.roots[i].lo = mid;
            }
        }
    }

    pub fn refine_all(&mut self, width: &Rat) {
        for i in 0..self.roots.len() {
            self.refine(i, width);
        }
    }

    pub fn square_free(&self) -> &UniPoly {
        &self.square_free
    }
}

impl UniPoly {
    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let chain = self.square_free_part().sturm_chain();
        variations_at_infinity(&chain, false) - variations_at_infinity(&chain, true)
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count_roots_in(&self, lo: &Rat, hi: &Rat) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let chain = self.square_free_part().sturm_chain();
        variations_at(&chain, lo) - variations_at(&chain, hi)
    }

    /// Isolates every real root in `[lo, hi]` (the whole line when `bounds` is
    /// `None`). Roots are reported once, in increasing order, with multiplicity.
    pub fn real_roots(&self, bounds: Option<(Rat, Rat)>) -> Result<RootIsolation, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::ZeroPolynomial);
        }
        let sf = self.square_free_part();
        let chain = sf.sturm_chain();
        let mut iso = RootIsolation {
            square_free: sf.clone(),
            chain,
            roots: Vec::new(),
        };
        if sf.degree().unwrap_or(0) == 0 {
            return Ok(iso);
        }
        let bound = sf.root_bound();
        let (lo, hi, closed_lo) = match bounds {
            Some((a, b)) => (a, b, true),
            None => (-bound.clone(), bound, false),
        };
        let mut found = Vec::new();
        if closed_lo && sf.eval(&lo).is_zero() {
            found.push(RealRoot {
                lo: lo.clone(),
                hi: lo.clone(),
                multiplicity: 0,
            });
        }
        let mut stack = vec![(lo, hi)];
        let two = rat::int(2);
        while let Some((a, b)) = stack.pop() {
            let c = iso.count_in(&a, &b);
            if c == 0 {
                continue;
            }
            if c == 1 {
                let exact = sf.eval(&b).is_zero();
                found.push(RealRoot {
                    lo: if exact { b.clone() } else { a },
                    hi: b,
                    multiplicity: 0,
                });
                continue;
            }
            let mid = (&a + &b) / &two;
            stack.push((mid.clone(), b));
            stack.push((a, mid));
        }
        found.sort_by(|x, y| x.lo.cmp(&y.lo));
        // Multiplicity: how many successive derivative gcds still vanish on the interval.
        for root in &mut found {
            let mut mult = 1;
            let mut g = UniPoly::gcd(self, &self.derivative());
            while g.degree().unwrap_or(0) > 0 && has_root_in(&g, root) {
                mult += 1;
                g = UniPoly::gcd(&g, &g.derivative());
            }
            root.multiplicity = mult;
        }
        iso.roots = found;
        Ok(iso)
    }
}

fn has_root_in(g: &UniPoly, root: &RealRoot) -> bool {
    if root.is_exact() {
        return g.eval(&root.lo).is_zero();
    }
    let chain = g.square_free_part().sturm_chain();
    variations_at(&chain, &root.lo) > variations_at(&chain, &root.hi)
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            let show_coeff = !a.is_one() || i == 0;
            if show_coeff {
                write!(f, "{}", rat::to_string(&a))?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn add(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn sub(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl<'a> Mul<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn mul(self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{int, rat};

    #[test]
    fn no_real_roots_for_one_plus_two_u_squared() {
        let p = UniPoly::from_ints(&[1, 0, 2]);
        assert!(p.real_roots(None).unwrap().roots.is_empty());
        assert_eq!(p.count_real_roots(), 0);
    }

    #[test]
    fn cubic_has_single_root_between_minus_three_and_minus_two() {
        // u^3 + 2u^2 + 1
        let p = UniPoly::from_ints(&[1, 0, 2, 1]);
        assert_eq!(p.eval(&int(-3)), int(-8));
        assert_eq!(p.eval(&int(-2)), int(1));
        let mut iso = p.real_roots(None).unwrap();
        assert_eq!(iso.roots.len(), 1);
        iso.refine(0, &rat(1, 1_000_000));
        let r = &iso.roots[0];
        assert!(r.lo >= int(-3) && r.hi <= int(-2));
        assert!((r.approx() + 2.205_569_430_400_59).abs() < 1e-5);
        assert_eq!(r.multiplicity, 1);
    }

    #[test]
    fn perfect_square_reports_multiplicity_two() {
        let p = UniPoly::from_ints(&[1, -2, 1]);
        let iso = p.real_roots(None).unwrap();
        assert_eq!(iso.roots.len(), 1);
        assert_eq!(iso.roots[0].multiplicity, 2);
        let mut iso = iso;
        iso.refine(0, &rat(1, 1 << 20));
        assert!((iso.roots[0].approx() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert!(matches!(
            UniPoly::zero().real_roots(None),
            Err(AlgebraError::ZeroPolynomial)
        ));
    }

    #[test]
    fn bounded_isolation_includes_closed_endpoints() {
        // (x-1)(x-2)(x+3)
        let p = &(&UniPoly::from_ints(&[-1, 1]) * &UniPoly::from_ints(&[-2, 1]))
            * &UniPoly::from_ints(&[3, 1]);
        let iso = p.real_roots(Some((int(1), int(2)))).unwrap();
        assert_eq!(iso.roots.len(), 2);
        assert_eq!(iso.roots[0].exact_value(), Some(&int(1)));
        let all = p.real_roots(None).unwrap();
        assert_eq!(all.roots.len(), 3);
    }

    #[test]
    fn gcd_and_division() {
        let a = UniPoly::from_ints(&[-1, 0, 1]); // x^2-1
        let b = UniPoly::from_ints(&[1, 1]); // x+1
        assert_eq!(UniPoly::gcd(&a, &b), b);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, UniPoly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn interval_evaluation_encloses_values() {
        let p = UniPoly::from_ints(&[1, -3, 0, 2]);
        let (lo, hi) = p.eval_interval(&rat(1, 2), &int(1));
        for x in [rat(1, 2), rat(3, 4), int(1)] {
            let v = p.eval(&x);
            assert!(lo <= v && v <= hi);
        }
    }
}
