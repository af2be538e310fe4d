//! Finite singular points: location, elemental and semi-elemental
//! classification, multiplicity and index.

use serde::Serialize;

use crate::algebra::{AlgNum, BiPoly, MultiPoly};
use crate::error::{Error, Result};
use crate::qsystem::{QuadSystem, MONOMIALS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularKind {
    Node,
    Focus,
    WeakFocus,
    Saddle,
    SaddleNode,
    SemiElementalNode,
    SemiElementalSaddle,
    Degenerate,
}

impl SingularKind {
    pub fn is_elemental(self) -> bool {
        matches!(self, Self::Node | Self::Focus | Self::WeakFocus | Self::Saddle)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    Unstable,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SemiVerdict {
    MultipleNode,
    MultipleSaddle,
    SaddleNode,
}

#[derive(Clone, Debug, Serialize)]
pub struct SemiElementalReport {
    pub alpha: u32,
    pub a: AlgNum,
    /// The nonzero eigenvalue.
    pub lambda: AlgNum,
    pub verdict: SemiVerdict,
    /// Leading coefficients of the center-manifold series `y = f(x)` in local
    /// eigen-coordinates (index = power of `x`).
    #[serde(skip)]
    pub center_manifold: Vec<AlgNum>,
    /// Local frame `(x, y) = point + X·kernel + Y·eigen`.
    #[serde(skip)]
    pub kernel: [AlgNum; 2],
    #[serde(skip)]
    pub eigen: [AlgNum; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteSingularity {
    pub x: AlgNum,
    pub y: AlgNum,
    pub approx: [f64; 2],
    pub kind: SingularKind,
    pub multiplicity: u32,
    pub index: i32,
    pub trace: AlgNum,
    pub det: AlgNum,
    pub stability: Stability,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semi: Option<SemiElementalReport>,
}

/// Default series order for the semi-elemental procedure.
pub const SERIES_CUTOFF: usize = 6;
const SERIES_CUTOFF_MAX: usize = 24;

/// Classifies the singular point at `(x0, y0)` of the field `(p, q)`.
pub fn classify_point(p: &BiPoly, q: &BiPoly, x0: &AlgNum, y0: &AlgNum) -> Result<Classified> {
    let j = [
        [p.dx().eval(x0, y0), p.dy().eval(x0, y0)],
        [q.dx().eval(x0, y0), q.dy().eval(x0, y0)],
    ];
    let trace = &j[0][0] + &j[1][1];
    let det = &(&j[0][0] * &j[1][1]) - &(&j[0][1] * &j[1][0]);
    let ds = det.sign();
    let ts = trace.sign();
    let stability = match ts {
        1 => Stability::Unstable,
        -1 => Stability::Stable,
        _ => Stability::None,
    };
    if ds < 0 {
        return Ok(Classified::new(SingularKind::Saddle, Stability::None, trace, det, None));
    }
    if ds > 0 {
        let disc = &(&trace * &trace) - &(&det * &AlgNum::from_int(4));
        let kind = if ts == 0 {
            SingularKind::WeakFocus
        } else if disc.sign() >= 0 {
            SingularKind::Node
        } else {
            SingularKind::Focus
        };
        let stab = if ts == 0 { Stability::None } else { stability };
        return Ok(Classified::new(kind, stab, trace, det, None));
    }
    if ts == 0 {
        return Ok(Classified::new(SingularKind::Degenerate, Stability::None, trace, det, None));
    }
    let report = semi_elemental(p, q, x0, y0, &j, &trace)?;
    let kind = match report.verdict {
        SemiVerdict::MultipleNode => SingularKind::SemiElementalNode,
        SemiVerdict::MultipleSaddle => SingularKind::SemiElementalSaddle,
        SemiVerdict::SaddleNode => SingularKind::SaddleNode,
    };
    let stab = match report.verdict {
        SemiVerdict::MultipleNode => stability,
        _ => Stability::None,
    };
    Ok(Classified::new(kind, stab, trace, det, Some(report)))
}

#[derive(Clone, Debug)]
pub struct Classified {
    pub kind: SingularKind,
    pub stability: Stability,
    pub trace: AlgNum,
    pub det: AlgNum,
    pub semi: Option<SemiElementalReport>,
}

impl Classified {
    fn new(
        kind: SingularKind,
        stability: Stability,
        trace: AlgNum,
        det: AlgNum,
        semi: Option<SemiElementalReport>,
    ) -> Self {
        Classified {
            kind,
            stability,
            trace,
            det,
            semi,
        }
    }

    /// Multiplicity implied by the local type (α for semi-elemental points).
    pub fn local_multiplicity(&self) -> u32 {
        self.semi.as_ref().map_or(1, |s| s.alpha)
    }
}

/// Prop. 2.1 style analysis: move to eigen-coordinates where the linear part
/// is `diag(0, λ)`, solve `λy + B(x, y) = 0` as a series `y = f(x)` and read
/// off the leading term of `g(x) = A(x, f(x))`.
fn semi_elemental(
    p: &BiPoly,
    q: &BiPoly,
    x0: &AlgNum,
    y0: &AlgNum,
    j: &[[AlgNum; 2]; 2],
    lambda: &AlgNum,
) -> Result<SemiElementalReport> {
    let (a, b, c, d) = (&j[0][0], &j[0][1], &j[1][0], &j[1][1]);
    let kernel = if !a.is_zero() || !b.is_zero() {
        [b.clone(), -a]
    } else {
        [d.clone(), -c]
    };
    let eigen = {
        let cand = [b.clone(), lambda - a];
        if cand.iter().any(|v| !v.is_zero()) {
            cand
        } else {
            [lambda - d, c.clone()]
        }
    };
    let mdet = &(&kernel[0] * &eigen[1]) - &(&kernel[1] * &eigen[0]);
    let inv = mdet.inv()?;
    let cx = BiPoly::constant(x0.clone());
    let cy = BiPoly::constant(y0.clone());
    let big_x = BiPoly::x();
    let big_y = BiPoly::y();
    let sx = &(&cx + &big_x.scale(&kernel[0])) + &big_y.scale(&eigen[0]);
    let sy = &(&cy + &big_x.scale(&kernel[1])) + &big_y.scale(&eigen[1]);
    let pp = p.compose(&sx, &sy);
    let qq = q.compose(&sx, &sy);
    // M⁻¹ = adj(M)/det(M) with M = [kernel | eigen]
    let aa = (&pp.scale(&eigen[1]) - &qq.scale(&eigen[0])).scale(&inv);
    let bb = (&qq.scale(&kernel[0]) - &pp.scale(&kernel[1])).scale(&inv);
    let linear_a = BiPoly::from_terms([(1, 0, aa.coeff(1, 0)), (0, 1, aa.coeff(0, 1))]);
    let linear_b = BiPoly::from_terms([(1, 0, bb.coeff(1, 0)), (0, 1, bb.coeff(0, 1))]);
    debug_assert!(linear_a.is_zero());
    debug_assert!(bb.coeff(1, 0).is_zero());
    let a_nl = &aa - &linear_a;
    let b_nl = &bb - &linear_b;
    let lam_inv = lambda.inv()?;

    let mut cutoff = SERIES_CUTOFF;
    loop {
        let f = center_series(&b_nl, &lam_inv, cutoff);
        let g = substitute_series(&a_nl, &f, cutoff);
        if let Some((alpha, coef)) = g.iter().enumerate().find(|(_, c)| !c.is_zero()) {
            let alpha = alpha as u32;
            let verdict = if alpha.is_multiple_of(2) {
                SemiVerdict::SaddleNode
            } else if coef.sign() == lambda.sign() {
                SemiVerdict::MultipleNode
            } else {
                SemiVerdict::MultipleSaddle
            };
            return Ok(SemiElementalReport {
                alpha,
                a: coef.clone(),
                lambda: lambda.clone(),
                verdict,
                center_manifold: f,
                kernel,
                eigen,
            });
        }
        if cutoff >= SERIES_CUTOFF_MAX {
            return Err(Error::DegenerateBeyondCutoff { cutoff });
        }
        cutoff *= 2;
    }
}

/// Coefficients `f_0..=f_N` of `y = f(x)` with `λf + B(x, f) = 0`,
/// `f = O(x²)`.
fn center_series(b: &BiPoly, lam_inv: &AlgNum, n: usize) -> Vec<AlgNum> {
    let mut f = vec![AlgNum::from_int(0); n + 1];
    for i in 2..=n {
        let s = substitute_series(b, &f, i);
        f[i] = -&(&s[i] * lam_inv);
    }
    f
}

/// Truncated series of `h(x, f(x))` up to order `n`.
fn substitute_series(h: &BiPoly, f: &[AlgNum], n: usize) -> Vec<AlgNum> {
    let zero = || AlgNum::from_int(0);
    let mul = |u: &[AlgNum], v: &[AlgNum]| -> Vec<AlgNum> {
        let mut out = vec![zero(); n + 1];
        for (i, a) in u.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in v.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        out
    };
    let fr: Vec<AlgNum> = (0..=n).map(|i| f.get(i).cloned().unwrap_or_else(zero)).collect();
    let mut out = vec![zero(); n + 1];
    let max_j = h.terms().map(|(&(_, j), _)| j).max().unwrap_or(0);
    let mut fpow = vec![vec![zero(); n + 1]];
    fpow[0][0] = AlgNum::from_int(1);
    for j in 1..=max_j as usize {
        let next = mul(&fpow[j - 1], &fr);
        fpow.push(next);
    }
    for (&(i, j), c) in h.terms() {
        let i = i as usize;
        if i > n {
            continue;
        }
        for (e, v) in fpow[j as usize].iter().enumerate().take(n + 1 - i) {
            if !v.is_zero() {
                out[i + e] = &out[i + e] + &(c * v);
            }
        }
    }
    out
}

pub fn index_of(kind: SingularKind) -> Result<i32> {
    match kind {
        SingularKind::Node
        | SingularKind::Focus
        | SingularKind::WeakFocus
        | SingularKind::SemiElementalNode => Ok(1),
        SingularKind::Saddle | SingularKind::SemiElementalSaddle => Ok(-1),
        SingularKind::SaddleNode => Ok(0),
        SingularKind::Degenerate => Err(Error::Unsupported(
            "index of a degenerate singular point".into(),
        )),
    }
}

/// All real finite singular points. The triple-node family uses closed forms;
/// other systems need rational coefficients and go through a resultant.
pub fn finite_singularities(s: &QuadSystem) -> Result<Vec<FiniteSingularity>> {
    let points = match s.tn_params() {
        Some(pp) => {
            let mu = &(&(&pp.k * &pp.k) + &(&(&pp.k * &pp.m) * &AlgNum::from_int(4)))
                - &(&pp.n * &AlgNum::from_int(4));
            let zero = AlgNum::from_int(0);
            let mut pts = vec![(zero.clone(), zero, 3)];
            if !mu.is_zero() {
                let inv = mu.inv()?;
                let x = &(&pp.k * &AlgNum::from_int(-2)) * &inv;
                let y = &AlgNum::from_int(4) * &inv;
                pts.push((x, y, 1));
            }
            pts
        }
        None => generic_points(s)?,
    };
    let (p, q) = (s.p_poly(), s.q_poly());
    let mut out = Vec::new();
    for (x, y, mult) in points {
        let c = classify_point(&p, &q, &x, &y)?;
        let index = match c.kind {
            SingularKind::Degenerate => 0,
            k => index_of(k)?,
        };
        out.push(FiniteSingularity {
            approx: [x.to_f64(), y.to_f64()],
            x,
            y,
            kind: c.kind,
            multiplicity: mult,
            index,
            trace: c.trace,
            det: c.det,
            stability: c.stability,
            semi: c.semi,
        });
    }
    Ok(out)
}

fn to_multipoly(c: &[AlgNum; 6]) -> Result<MultiPoly> {
    let mut out = MultiPoly::zero(2);
    for (&(i, j), v) in MONOMIALS.iter().zip(c) {
        let r = v
            .as_rat()
            .ok_or_else(|| Error::Unsupported("general systems need rational coefficients".into()))?;
        out.add_term(vec![i, j], r);
    }
    Ok(out)
}

/// Points of `p = q = 0` for a rational system: `y` from the resultant in `x`,
/// then `x` from the gcd of the specializations. Irrational `y` levels are
/// handled in `Q(y₀)`; multiplicities come from the resultant when each level
/// carries a single point.
fn generic_points(s: &QuadSystem) -> Result<Vec<(AlgNum, AlgNum, u32)>> {
    let p = to_multipoly(s.p())?;
    let q = to_multipoly(s.q())?;
    if p.degree_in(0).unwrap_or(0) == 0 && q.degree_in(0).unwrap_or(0) == 0 {
        return swapped(s);
    }
    let r = MultiPoly::resultant(&p, &q, 0)?;
    if r.is_zero() {
        return Err(Error::Degenerate("p and q share a common factor".into()));
    }
    let ry = r.to_unipoly(1)?;
    if ry.degree().unwrap_or(0) == 0 {
        return Ok(vec![]);
    }
    let iso = ry.real_roots(None)?;
    let mut out = Vec::new();
    for root in &iso.roots {
        let y0 = match root.exact_value() {
            Some(v) => AlgNum::from_rat(v.clone()),
            None => {
                let g = crate::algebra::Generator::new(
                    iso.square_free().clone(),
                    root.lo.clone(),
                    root.hi.clone(),
                    "y0",
                )?;
                AlgNum::generator(std::sync::Arc::new(g))
            }
        };
        let xs = x_solutions(&p, &q, &y0)?;
        let n = xs.len() as u32;
        for x0 in xs {
            let mult = if n == 1 { root.multiplicity as u32 } else { 1 };
            out.push((x0, y0.clone(), mult));
        }
    }
    Ok(out)
}

/// Both `p` and `q` are free of `x`: swap roles via the transposed system.
fn swapped(s: &QuadSystem) -> Result<Vec<(AlgNum, AlgNum, u32)>> {
    let sw = |c: &[AlgNum; 6]| {
        [
            c[0].clone(),
            c[2].clone(),
            c[1].clone(),
            c[5].clone(),
            c[4].clone(),
            c[3].clone(),
        ]
    };
    let t = QuadSystem::new(sw(s.p()), sw(s.q()))?;
    let pts = generic_points(&t)?;
    Ok(pts.into_iter().map(|(x, y, m)| (y, x, m)).collect())
}

/// Real `x` with `p(x, y0) = q(x, y0) = 0`, for `y0` rational or in `Q(y0)`.
fn x_solutions(p: &MultiPoly, q: &MultiPoly, y0: &AlgNum) -> Result<Vec<AlgNum>> {
    let spec = |f: &MultiPoly| -> Vec<AlgNum> {
        f.coeffs_in(0)
            .iter()
            .map(|c| {
                c.coeffs_in(1)
                    .iter()
                    .enumerate()
                    .fold(AlgNum::from_int(0), |acc, (e, cc)| {
                        let v = cc.coeff(&[0, 0]);
                        &acc + &(&AlgNum::from_rat(v) * &y0.pow(e as u32))
                    })
            })
            .collect()
    };
    let pc = trim(spec(p));
    let qc = trim(spec(q));
    let g = poly_gcd_alg(pc, qc)?;
    match g.len() {
        0 => Err(Error::Degenerate("continuum of singular points".into())),
        1 => Ok(vec![]),
        2 => Ok(vec![-&g[0].div(&g[1])?]),
        3 => {
            // monic quadratic x² + bx + c over Q(y0)
            let lead = g[2].inv()?;
            let b = &g[1] * &lead;
            let c = &g[0] * &lead;
            let disc = &(&b * &b) - &(&c * &AlgNum::from_int(4));
            let half = AlgNum::from_rat(crate::algebra::rat::rat(1, 2));
            match disc.sign() {
                -1 => Ok(vec![]),
                0 => Ok(vec![&-&b * &half]),
                _ => {
                    let dr = disc.as_rat().ok_or_else(|| {
                        Error::Unsupported("two singular points on an irrational level".into())
                    })?;
                    let sq = AlgNum::sqrt(&dr)?;
                    Ok(vec![&(&-&b - &sq) * &half, &(&-&b + &sq) * &half])
                }
            }
        }
        _ => Err(Error::Unsupported("unexpected gcd degree".into())),
    }
}

fn trim(mut v: Vec<AlgNum>) -> Vec<AlgNum> {
    while v.last().is_some_and(AlgNum::is_zero) {
        v.pop();
    }
    v
}

fn poly_gcd_alg(mut a: Vec<AlgNum>, mut b: Vec<AlgNum>) -> Result<Vec<AlgNum>> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = poly_rem_alg(&a, &b)?;
        a = b;
        b = r;
    }
    Ok(a)
}

fn poly_rem_alg(a: &[AlgNum], b: &[AlgNum]) -> Result<Vec<AlgNum>> {
    let mut r = a.to_vec();
    let lead_inv = b.last().expect("nonzero divisor").inv()?;
    while r.len() >= b.len() {
        let t = &r[r.len() - 1] * &lead_inv;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &(&t * c);
        }
        r.pop();
        r = trim(r);
    }
    Ok(r)
}

/// Winding number of `(p, q)` along a circle of radius `r` around `(x, y)`.
pub fn winding_index(s: &QuadSystem, x: f64, y: f64, r: f64, samples: usize) -> i32 {
    let f = s.float();
    let mut total = 0.0;
    let angle = |t: f64| {
        let (u, v) = f.eval(x + r * t.cos(), y + r * t.sin());
        v.atan2(u)
    };
    let mut prev = angle(0.0);
    for i in 1..=samples {
        let t = std::f64::consts::TAU * i as f64 / samples as f64;
        let a = angle(t);
        let mut d = a - prev;
        while d > std::f64::consts::PI {
            d -= std::f64::consts::TAU;
        }
        while d < -std::f64::consts::PI {
            d += std::f64::consts::TAU;
        }
        total += d;
        prev = a;
    }
    (total / std::f64::consts::TAU).round() as i32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{int, rat};
    use crate::algebra::Rat;
    use crate::qsystem::{tn_system, ParamPoint};

    fn tn(m: Rat, n: Rat, k: Rat) -> QuadSystem {
        tn_system(&ParamPoint::rational(m, n, k))
    }

    #[test]
    fn origin_is_unstable_triple_node() {
        let s = tn(int(0), int(-1), int(0));
        let pts = finite_singularities(&s).unwrap();
        assert_eq!(pts.len(), 2);
        let o = &pts[0];
        assert_eq!(o.kind, SingularKind::SemiElementalNode);
        assert_eq!(o.multiplicity, 3);
        assert_eq!(o.index, 1);
        assert_eq!(o.stability, Stability::Unstable);
        let semi = o.semi.as_ref().unwrap();
        assert_eq!(semi.alpha, 3);
        assert_eq!(semi.a, AlgNum::from_int(2));
        let sd = &pts[1];
        assert_eq!((sd.x.clone(), sd.y.clone()), (AlgNum::from_int(0), AlgNum::from_int(1)));
        assert_eq!(sd.kind, SingularKind::Saddle);
        assert_eq!(sd.index, -1);
    }

    #[test]
    fn only_origin_on_mu_zero() {
        let s = tn(rat(-5, 2), rat(-9, 4), int(1));
        assert_eq!(finite_singularities(&s).unwrap().len(), 1);
    }

    #[test]
    fn saddle_node_from_generic_path() {
        // ẋ = x², ẏ = y
        let s = QuadSystem::from_ints([0, 0, 0, 1, 0, 0], [0, 0, 1, 0, 0, 0]).unwrap();
        let pts = finite_singularities(&s).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].kind, SingularKind::SaddleNode);
        assert_eq!(pts[0].multiplicity, 2);
        assert_eq!(pts[0].index, 0);
    }

    #[test]
    fn series_examples() {
        // ẋ = x² + xy, ẏ = y: α = 2, a = 1.
        let s = QuadSystem::from_ints([0, 0, 0, 1, 1, 0], [0, 0, 1, 0, 0, 0]).unwrap();
        let z = AlgNum::from_int(0);
        let c = classify_point(&s.p_poly(), &s.q_poly(), &z, &z).unwrap();
        let r = c.semi.unwrap();
        assert_eq!((r.alpha, r.a), (2, AlgNum::from_int(1)));
        assert_eq!(r.verdict, SemiVerdict::SaddleNode);
        // ẋ = −x³, ẏ = y: multiple saddle.
        let p = BiPoly::from_terms([(3, 0, AlgNum::from_int(-1))]);
        let q = BiPoly::y();
        let r = classify_point(&p, &q, &z, &z).unwrap().semi.unwrap();
        assert_eq!((r.alpha, r.a.clone()), (3, AlgNum::from_int(-1)));
        assert_eq!(r.verdict, SemiVerdict::MultipleSaddle);
    }

    #[test]
    fn degenerate_beyond_cutoff() {
        // ẋ = 0·…, ẏ = y with A ≡ 0: a line of singular points.
        let p = BiPoly::from_terms([(1, 1, AlgNum::from_int(1))]);
        let q = BiPoly::y();
        let z = AlgNum::from_int(0);
        assert!(matches!(
            classify_point(&p, &q, &z, &z),
            Err(Error::DegenerateBeyondCutoff { .. })
        ));
    }

    #[test]
    fn second_point_trace_vanishes_on_hopf_surface() {
        // T4 = 0 at k = 2, n = −3; m = −3 gives μ = −8 < 0, an antisaddle.
        let s = tn(int(-3), int(-3), int(2));
        let pts = finite_singularities(&s).unwrap();
        assert!(pts[1].trace.is_zero());
        assert_eq!(pts[1].kind, SingularKind::WeakFocus);
    }

    #[test]
    fn winding_numbers_match_indices() {
        let s = tn(int(0), int(-1), int(0));
        assert_eq!(winding_index(&s, 0.0, 0.0, 0.05, 2000), 1);
        assert_eq!(winding_index(&s, 0.0, 1.0, 0.05, 2000), -1);
    }
}
