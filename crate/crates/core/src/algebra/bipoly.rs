//! Bivariate polynomials with coefficients in `Q(α)`, used for local analysis
//! of vector fields at (possibly irrational) singular points.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::numfield::AlgNum;

#[derive(Clone, Debug, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), AlgNum>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: AlgNum) -> Self {
        let mut p = Self::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn x() -> Self {
        let mut p = Self::zero();
        p.add_term(1, 0, AlgNum::from_int(1));
        p
    }

    pub fn y() -> Self {
        let mut p = Self::zero();
        p.add_term(0, 1, AlgNum::from_int(1));
        p
    }

    /// `Σ c·x^i·y^j` from `(i, j, c)` triples.
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, AlgNum)>) -> Self {
        let mut p = Self::zero();
        for (i, j, c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: AlgNum) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&(i, j)) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert((i, j), sum);
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> AlgNum {
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| AlgNum::from_int(0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &AlgNum)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    pub fn scale(&self, s: &AlgNum) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(i, j), c)| (i, j, c * s)))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(AlgNum::from_int(1)), |acc, _| &acc * self)
    }

    pub fn eval(&self, x: &AlgNum, y: &AlgNum) -> AlgNum {
        self.terms
            .iter()
            .fold(AlgNum::from_int(0), |acc, (&(i, j), c)| {
                &acc + &(&(c * &x.pow(i)) * &y.pow(j))
            })
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| c.to_f64() * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    }

    pub fn dx(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&(i, _), _)| i > 0)
                .map(|(&(i, j), c)| (i - 1, j, c * &AlgNum::from_int(i as i64))),
        )
    }

    pub fn dy(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&(_, j), _)| j > 0)
                .map(|(&(i, j), c)| (i, j - 1, c * &AlgNum::from_int(j as i64))),
        )
    }

    /// Substitutes `x ↦ sx`, `y ↦ sy`.
    pub fn compose(&self, sx: &BiPoly, sy: &BiPoly) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            let t = &(&sx.pow(i) * &sy.pow(j)).scale(c);
            out = &out + t;
        }
        out
    }

    /// Float coefficients `(i, j, c)` for fast evaluation.
    pub fn to_f64_terms(&self) -> Vec<(i32, i32, f64)> {
        self.terms
            .iter()
            .map(|(&(i, j), c)| (i as i32, j as i32, c.to_f64()))
            .collect()
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, o: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &o.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, o: &BiPoly) -> BiPoly {
        self + &(-o)
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly::from_terms(self.terms.iter().map(|(&(i, j), c)| (i, j, -c)))
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, o: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &o.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_composition() {
        // (x + y)^2 with x -> 1 + X, y -> -1 + Y gives (X + Y)^2
        let p = (&BiPoly::x() + &BiPoly::y()).pow(2);
        let one = BiPoly::constant(AlgNum::from_int(1));
        let q = p.compose(&(&one + &BiPoly::x()), &(&BiPoly::y() - &one));
        let expect = (&BiPoly::x() + &BiPoly::y()).pow(2);
        assert!((&q - &expect).is_zero());
    }

    #[test]
    fn derivatives() {
        let p = BiPoly::from_terms([(2, 1, AlgNum::from_int(3))]);
        assert_eq!(p.dx().coeff(1, 1), AlgNum::from_int(6));
        assert_eq!(p.dy().coeff(2, 0), AlgNum::from_int(3));
    }
}
