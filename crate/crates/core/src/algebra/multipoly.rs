//! Sparse multivariate polynomials with rational coefficients.
//!
//! Variables are positional (`x0, x1, ...`); the arity is fixed per polynomial
//! and every binary operation requires matching arity.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::rat::{self, Rat};
use super::unipoly::UniPoly;
use super::AlgebraError;

pub type Exponent = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, Rat>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rat::one());
        p
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs with integer coefficients.
    pub fn from_terms(nvars: usize, terms: &[(i64, &[u32])]) -> Self {
        let mut p = Self::zero(nvars);
        for (c, e) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(e.to_vec(), rat::int(*c));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Exponent, c: Rat) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coeff(&self, e: &[u32]) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    pub fn scale(&self, s: &Rat) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.nvars), |acc, _| &acc * self)
    }

    /// Evaluates the polynomial at a point whose coordinates live in any ring
    /// that rationals can be lifted into.
    pub fn eval_with<T, L>(&self, point: &[T], lift: L) -> Result<T, AlgebraError>
    where
        T: Clone + Add<Output = T> + Mul<Output = T>,
        L: Fn(&Rat) -> T,
    {
        if point.len() != self.nvars {
            return Err(AlgebraError::ArityMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut acc = lift(&Rat::zero());
        for (e, c) in &self.terms {
            let mut term = lift(c);
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    term = term * x.clone();
                }
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    pub fn eval(&self, point: &[Rat]) -> Result<Rat, AlgebraError> {
        self.eval_with(point, |c| c.clone())
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(rat::to_f64(c), |acc, (&k, &x)| acc * x.powi(k as i32))
            })
            .sum()
    }

    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[var] -= 1;
            out.add_term(ne, c * rat::int(e[var] as i64));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    /// Replaces `x_var` by `value`, keeping the arity (the variable no longer occurs).
    pub fn specialize(&self, var: usize, value: &Rat) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne[var];
            ne[var] = 0;
            out.add_term(ne, c * num_traits::pow(value.clone(), k as usize));
        }
        out
    }

    /// Replaces `x_var` by the polynomial `q` (same arity).
    pub fn substitute(&self, var: usize, q: &MultiPoly) -> Self {
        assert_eq!(q.nvars, self.nvars);
        let coeffs = self.coeffs_in(var);
        let mut out = Self::zero(self.nvars);
        for c in coeffs.iter().rev() {
            out = &(&out * q) + c;
        }
        out
    }

    /// Substitutes `x_var = num/den` and clears the denominator, returning
    /// `den^d · p(…, num/den, …)` with `d` the degree of `p` in `x_var`.
    pub fn substitute_fraction(&self, var: usize, num: &MultiPoly, den: &MultiPoly) -> Self {
        let coeffs = self.coeffs_in(var);
        let d = coeffs.len().saturating_sub(1) as u32;
        let mut out = Self::zero(self.nvars);
        for (i, c) in coeffs.iter().enumerate() {
            let t = &(c * &num.pow(i as u32)) * &den.pow(d - i as u32);
            out = &out + &t;
        }
        out
    }

    /// Same polynomial viewed in a ring with more (trailing) variables.
    pub fn extend(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne.resize(nvars, 0);
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Coefficients with respect to `x_var`, lowest power first. The returned
    /// polynomials do not contain `x_var`.
    pub fn coeffs_in(&self, var: usize) -> Vec<MultiPoly> {
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![Self::zero(self.nvars); deg + 1];
        if self.is_zero() {
            return vec![];
        }
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne[var] as usize;
            ne[var] = 0;
            out[k].add_term(ne, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(nvars: usize, var: usize, coeffs: &[MultiPoly]) -> Self {
        let x = Self::var(nvars, var);
        let mut out = Self::zero(nvars);
        for c in coeffs.iter().rev() {
            out = &(&out * &x) + c;
        }
        out
    }

    /// Converts to a univariate polynomial in `x_var`; fails if any other variable occurs.
    pub fn to_unipoly(&self, var: usize) -> Result<UniPoly, AlgebraError> {
        let mut coeffs = Vec::new();
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(i, &k)| i != var && k > 0) {
                return Err(AlgebraError::NotUnivariate);
            }
            let k = e[var] as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Rat::zero());
            }
            coeffs[k] = c.clone();
        }
        Ok(UniPoly::new(coeffs))
    }

    pub fn from_unipoly(nvars: usize, var: usize, p: &UniPoly) -> Self {
        let mut out = Self::zero(nvars);
        for (k, c) in p.coeffs().iter().enumerate() {
            let mut e = vec![0; nvars];
            e[var] = k as u32;
            out.add_term(e, c.clone());
        }
        out
    }

    /// Reduces modulo a relation that is monic in `x_var` (e.g. `s^2 - 2`),
    /// so that the result has degree below the relation's degree in `x_var`.
    pub fn reduce_monic(&self, var: usize, relation: &MultiPoly) -> Result<Self, AlgebraError> {
        let rc = relation.coeffs_in(var);
        let d = rc.len().checked_sub(1).ok_or(AlgebraError::ZeroPolynomial)?;
        if d == 0 || rc[d] != Self::one(self.nvars) {
            return Err(AlgebraError::NotMonic);
        }
        let mut coeffs = self.coeffs_in(var);
        while coeffs.len() > d {
            let top = coeffs.pop().expect("non-empty");
            let shift = coeffs.len() - d;
            for (i, r) in rc.iter().take(d).enumerate() {
                coeffs[shift + i] = &coeffs[shift + i] - &(&top * r);
            }
        }
        Ok(Self::from_coeffs_in(self.nvars, var, &coeffs))
    }

    /// Leading term in lexicographic order.
    fn leading_term(&self) -> Option<(&Exponent, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &MultiPoly) -> Option<MultiPoly> {
        let (de, dc) = d.leading_term()?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((re, rc)) = rem.leading_term() {
            if re.iter().zip(de).any(|(a, b)| a < b) {
                return None;
            }
            let e: Exponent = re.iter().zip(de).map(|(a, b)| a - b).collect();
            let c = rc / dc;
            let mut t = Self::zero(self.nvars);
            t.add_term(e, c);
            rem = &rem - &(&t * d);
            quot = &quot + &t;
        }
        Some(quot)
    }

    /// Sylvester resultant with respect to `x_var`.
    ///
    /// Rows of the Sylvester matrix list coefficients in ascending powers of the
    /// eliminated variable. With this convention `Res(x - a, x - b) = b - a`.
    pub fn resultant(p: &MultiPoly, q: &MultiPoly, var: usize) -> Result<MultiPoly, AlgebraError> {
        if p.nvars != q.nvars {
            return Err(AlgebraError::ArityMismatch {
                expected: p.nvars,
                found: q.nvars,
            });
        }
        let pc = p.coeffs_in(var);
        let qc = q.coeffs_in(var);
        let dp = pc.len().saturating_sub(1);
        let dq = qc.len().saturating_sub(1);
        if dp == 0 && dq == 0 {
            return Err(AlgebraError::ConstantInVariable(var));
        }
        let n = dp + dq;
        let nv = p.nvars;
        let mut m = vec![vec![Self::zero(nv); n]; n];
        for r in 0..dq {
            for (i, c) in pc.iter().rev().enumerate() {
                m[r][r + i] = c.clone();
            }
        }
        for r in 0..dp {
            for (i, c) in qc.iter().rev().enumerate() {
                m[dq + r][r + i] = c.clone();
            }
        }
        // Columns listed in ascending powers: reversing them multiplies by (−1)^(N(N−1)/2).
        let det = bareiss_det(m, nv);
        Ok(if (n * (n.saturating_sub(1)) / 2) % 2 == 1 { -&det } else { det })
    }
}

/// Fraction-free Gaussian elimination over the polynomial ring.
fn bareiss_det(mut m: Vec<Vec<MultiPoly>>, nvars: usize) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::one(nvars);
    }
    let mut sign = Rat::one();
    let mut prev = MultiPoly::one(nvars);
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return MultiPoly::zero(nvars);
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num
                    .exact_div(&prev)
                    .expect("Bareiss division is exact over an integral domain");
            }
        }
        prev = m[k][k].clone();
    }
    m[n - 1][n - 1].scale(&sign)
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, o: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, o.nvars, "arity mismatch");
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, o: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, o.nvars, "arity mismatch");
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, o: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, o.nvars, "arity mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rat::one())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        self.fmt_with(f, &names)
    }
}

impl MultiPoly {
    pub fn display_with<'a>(&'a self, names: &'a [&'a str]) -> impl fmt::Display + 'a {
        struct D<'a>(&'a MultiPoly, &'a [&'a str]);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let names: Vec<String> = self.1.iter().map(|s| s.to_string()).collect();
                self.0.fmt_with(f, &names)
            }
        }
        D(self, names)
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, names: &[String]) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let a = c.abs();
            let monomial: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        names[i].clone()
                    } else {
                        format!("{}^{}", names[i], k)
                    }
                })
                .collect();
            if monomial.is_empty() {
                write!(f, "{}", rat::to_string(&a))?;
            } else if a.is_one() {
                write!(f, "{}", monomial.join("*"))?;
            } else {
                write!(f, "{}*{}", rat::to_string(&a), monomial.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{int, rat};

    fn x(i: usize) -> MultiPoly {
        MultiPoly::var(3, i)
    }

    #[test]
    fn linear_resultant_convention() {
        // x0 eliminated; a = x1, b = x2.
        let p = &x(0) - &x(1);
        let q = &x(0) - &x(2);
        let r = MultiPoly::resultant(&p, &q, 0).unwrap();
        assert_eq!(r, &x(2) - &x(1));
    }

    #[test]
    fn resultant_of_constants_is_usage_error() {
        let p = MultiPoly::constant(3, int(2));
        assert!(matches!(
            MultiPoly::resultant(&p, &x(1), 0),
            Err(AlgebraError::ConstantInVariable(0))
        ));
    }

    #[test]
    fn exact_division() {
        let a = &(&x(0) + &x(1)) * &(&x(0) - &x(2));
        let b = &x(0) + &x(1);
        assert_eq!(a.exact_div(&b).unwrap(), &x(0) - &x(2));
        assert!(x(0).exact_div(&x(1)).is_none());
    }

    #[test]
    fn eval_reports_arity_mismatch() {
        let p = &x(0) * &x(1);
        assert!(p.eval(&[int(1), int(2)]).is_err());
        assert_eq!(p.eval(&[int(3), rat(1, 2), int(7)]).unwrap(), rat(3, 2));
    }

    #[test]
    fn reduce_by_square_root_relation() {
        // s^2 - 2 in variable 1; (s + 1)^2 = 3 + 2 s.
        let s = MultiPoly::var(2, 1);
        let rel = &(&s * &s) - &MultiPoly::constant(2, int(2));
        let v = (&s + &MultiPoly::one(2)).pow(2);
        let red = v.reduce_monic(1, &rel).unwrap();
        assert_eq!(red, &s.scale(&int(2)) + &MultiPoly::constant(2, int(3)));
    }

    #[test]
    fn substitution_composes() {
        // p(x0) = x0^2, substitute x0 -> x1 + 1
        let p = x(0).pow(2);
        let q = &x(1) + &MultiPoly::one(3);
        assert_eq!(p.substitute(0, &q), q.pow(2));
    }
}
