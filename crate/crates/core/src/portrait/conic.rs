//! Transversal conics: parity certificates for limit cycles around a focus
//! isolated by one branch of a hyperbola.

use std::fmt;

use serde::Serialize;

use crate::qsystem::{tn_system, FloatSystem, ParamPoint};

/// `H = a x² + b x y + y² + d x + e y + f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Conic {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Conic {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.a * x * x + self.b * x * y + y * y + self.d * x + self.e * y + self.f
    }

    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        [2.0 * self.a * x + self.b * y + self.d, self.b * x + 2.0 * y + self.e]
    }

    /// `x` where the right-hand component of the hyperbola turns, if the
    /// conic is a hyperbola with a vertical-tangent point there.
    fn turning_x(&self) -> Option<f64> {
        let qa = self.b * self.b - 4.0 * self.a;
        let qb = 2.0 * self.b * self.e - 4.0 * self.d;
        let qc = self.e * self.e - 4.0 * self.f;
        let disc = qb * qb - 4.0 * qa * qc;
        (qa > 0.0 && disc >= 0.0).then(|| (-qb + disc.sqrt()) / (2.0 * qa))
    }

    /// Lower and upper `y` on the conic over `x`.
    fn ys(&self, x: f64) -> [f64; 2] {
        let bq = self.b * x + self.e;
        let cq = self.a * x * x + self.d * x + self.f;
        let r = (bq * bq - 4.0 * cq).max(0.0).sqrt();
        [(-bq - r) / 2.0, (-bq + r) / 2.0]
    }
}

/// Sign of `√(s²)` in the closed-form constant term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootBranch {
    Absolute,
    Signed,
}

/// The two parameter points on the infinite-collision surface carrying a
/// closed-form hyperbola.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParityPoint {
    /// `(−29/2, −105/4, 7)`, expected even.
    Even,
    /// `(−49/2, −185/4, 12)`, expected odd.
    Odd,
}

impl ParityPoint {
    pub fn params(self) -> [f64; 3] {
        match self {
            ParityPoint::Even => [-14.5, -26.25, 7.0],
            ParityPoint::Odd => [-24.5, -46.25, 12.0],
        }
    }

    pub fn param_point(self) -> ParamPoint {
        use crate::algebra::Rat;
        let r = |n: i64, d: i64| Rat::new(n.into(), d.into());
        match self {
            ParityPoint::Even => ParamPoint::rational(r(-29, 2), r(-105, 4), r(7, 1)),
            ParityPoint::Odd => ParamPoint::rational(r(-49, 2), r(-185, 4), r(12, 1)),
        }
    }

    pub fn expected(self) -> Parity {
        match self {
            ParityPoint::Even => Parity::Even,
            ParityPoint::Odd => Parity::Odd,
        }
    }

    /// Hyperbola with asymptotes along the infinite singular directions, `e`
    /// free and `d`, `f` from their closed forms.
    pub fn conic(self, branch: RootBranch) -> Conic {
        // (a, b, e, s, t, u, v, w): d = (√(s e² + 1) + t e − 1)/u,
        // f = (e² − v d e + e r)/(w r − c) with r = √((v d − e)²).
        let (a, b, e, s, t, u, v, w, c): (f64, f64, f64, f64, f64, f64, f64, f64, f64) = match self {
            ParityPoint::Even => (1.0 / 14.0, 57.0 / 28.0, -324.0 / 10000.0, 148225.0, 399.0, 392.0, 28.0, 1516.0, 110.0),
            ParityPoint::Odd => (1.0 / 24.0, 97.0 / 48.0, -18663.0 / 100000.0, 1299600.0, 1164.0, 1152.0, 48.0, 4516.0, 190.0),
        };
        let d = ((s * e * e + 1.0).sqrt() + t * e - 1.0) / u;
        let r = match branch {
            RootBranch::Absolute => (v * d - e).abs(),
            RootBranch::Signed => v * d - e,
        };
        let f = (e * e - v * d * e + e * r) / (w * r - c);
        Conic { a, b, d, e, f }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConicCertificate {
    pub conic: Conic,
    /// `x` range of the sampled branch.
    pub window: (f64, f64),
    /// Constant sign of `∇H·X` on the branch.
    pub crossing: i8,
    pub verdict: Parity,
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BranchSample {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateFailure {
    pub conic: Conic,
    pub reason: String,
    pub positive: usize,
    pub negative: usize,
    /// Maximal runs of the minority sign, first and last sample of each.
    pub offending: Vec<[BranchSample; 2]>,
}

impl fmt::Display for CertificateFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "certificate failed: {} ({} positive, {} negative", self.reason, self.positive, self.negative)?;
        if let Some([s, t]) = self.offending.first() {
            write!(f, "; first offending arc x ∈ [{:.6}, {:.6}]", s.x.min(t.x), s.x.max(t.x))?;
        }
        write!(f, ")")
    }
}

impl std::error::Error for CertificateFailure {}

/// Points on the component of `H = 0` lying to the right of its turning
/// point: both halves, `n / 2` geometrically spaced abscissae each.
pub fn branch_samples(h: &Conic, n: usize, reach: f64) -> Option<Vec<[f64; 2]>> {
    let x0 = h.turning_x()?;
    let half = (n / 2).max(2);
    let scale = x0.abs().max(1e-6);
    let mut pts = Vec::with_capacity(2 * half);
    for lower in [true, false] {
        for i in 0..half {
            let t = if i == 0 { 0.0 } else { scale * 1e-9 * (reach / 1e-9).powf(i as f64 / (half - 1) as f64) };
            let [y0, y1] = h.ys(x0 + t);
            pts.push([x0 + t, if lower { y0 } else { y1 }]);
        }
    }
    Some(pts)
}

/// Dense-sampling check that the flow crosses the right-hand branch of `h`
/// (which must lie in the fourth quadrant and enclose the focus in `H < 0`)
/// in one direction only. Outward crossing around a repelling focus gives
/// an even cycle count, inward an odd one.
pub fn conic_certificate(p: &ParamPoint, h: &Conic, samples: usize) -> Result<ConicCertificate, CertificateFailure> {
    let s = tn_system(&p.rationalized()).float();
    let [m, n, k] = p.approx();
    let mu = k * k + 4.0 * k * m - 4.0 * n;
    certify(&s, [-2.0 * k / mu, 4.0 / mu], h, samples)
}

/// Certificate for an arbitrary quadratic field and focus location.
pub fn certify(s: &FloatSystem, focus: [f64; 2], h: &Conic, samples: usize) -> Result<ConicCertificate, CertificateFailure> {
    let fail = |reason: String| CertificateFailure {
        conic: *h,
        reason,
        positive: 0,
        negative: 0,
        offending: vec![],
    };
    let pts = branch_samples(h, samples, 1e4).ok_or_else(|| fail("no real right-hand branch".into()))?;
    if pts.iter().any(|q| q[0] <= 0.0 || q[1] >= 0.0) {
        return Err(fail("branch leaves the fourth quadrant".into()));
    }
    if h.eval(focus[0], focus[1]) >= 0.0 {
        return Err(fail(format!("focus ({:.6}, {:.6}) not in H < 0", focus[0], focus[1])));
    }
    let values: Vec<BranchSample> = pts
        .iter()
        .map(|q| {
            let (pp, qq) = s.eval(q[0], q[1]);
            let g = h.gradient(q[0], q[1]);
            BranchSample { x: q[0], y: q[1], value: g[0] * pp + g[1] * qq }
        })
        .collect();
    let positive = values.iter().filter(|v| v.value > 0.0).count();
    let negative = values.iter().filter(|v| v.value < 0.0).count();
    let window = (pts[0][0], pts.iter().map(|q| q[0]).fold(f64::MIN, f64::max));
    if negative == 0 && positive == values.len() {
        return Ok(ConicCertificate { conic: *h, window, crossing: 1, verdict: Parity::Even, samples: values.len() });
    }
    if positive == 0 && negative == values.len() {
        return Ok(ConicCertificate { conic: *h, window, crossing: -1, verdict: Parity::Odd, samples: values.len() });
    }
    let minority = if positive < negative { 1.0 } else { -1.0 };
    let mut offending = Vec::new();
    // The two halves are separate arcs; runs never straddle them.
    for half in values.chunks(values.len() / 2) {
        let mut run: Option<(BranchSample, BranchSample)> = None;
        for v in half {
            if v.value * minority > 0.0 || v.value == 0.0 {
                run = Some(run.map_or((*v, *v), |(a, _)| (a, *v)));
            } else if let Some((a, b)) = run.take() {
                offending.push([a, b]);
            }
        }
        if let Some((a, b)) = run {
            offending.push([a, b]);
        }
    }
    Err(CertificateFailure {
        conic: *h,
        reason: "flow crosses the branch in both directions".into(),
        positive,
        negative,
        offending,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_lies_on_conic() {
        let h = ParityPoint::Even.conic(RootBranch::Absolute);
        let pts = branch_samples(&h, 2000, 1e3).unwrap();
        for q in pts {
            let scale = 1.0 + q[0] * q[0] + q[1] * q[1];
            assert!(h.eval(q[0], q[1]).abs() < 1e-9 * scale, "{q:?}");
        }
    }

    #[test]
    fn signed_root_degenerates_constant_term() {
        // e² − v d e + e (v d − e) vanishes identically.
        for p in [ParityPoint::Even, ParityPoint::Odd] {
            assert!(p.conic(RootBranch::Signed).f.abs() < 1e-15);
        }
    }

    #[test]
    fn circle_around_repelling_focus_fails_without_branch() {
        let h = Conic { a: 1.0, b: 0.0, d: 0.0, e: 0.0, f: -1.0 };
        let p = ParityPoint::Even.param_point();
        let err = conic_certificate(&p, &h, 1000).unwrap_err();
        assert!(err.reason.contains("no real"));
    }

    /// `(y + 2x − 3)(y + x/2 + 3/2) + 1/2`: right branch inside the sector
    /// with apex (3, −3), enclosing (5, −6) in `H < 0`.
    const SECTOR: Conic = Conic { a: 1.0, b: 2.5, d: 1.5, e: -1.5, f: -4.0 };

    #[test]
    fn radial_fields_give_both_verdicts() {
        let out = FloatSystem { p: [-5.0, 1.0, 0.0, 0.0, 0.0, 0.0], q: [6.0, 0.0, 1.0, 0.0, 0.0, 0.0] };
        let c = certify(&out, [5.0, -6.0], &SECTOR, 4000).unwrap();
        assert_eq!((c.crossing, c.verdict), (1, Parity::Even));
        let inward = FloatSystem { p: out.p.map(|v| -v), q: out.q.map(|v| -v) };
        assert_eq!(certify(&inward, [5.0, -6.0], &SECTOR, 4000).unwrap().verdict, Parity::Odd);
    }

    #[test]
    fn rotation_breaks_certificate() {
        // Pure rotation about the focus is tangent to circles, not to the
        // branch: it crosses both ways.
        let rot = FloatSystem { p: [-6.0, 0.0, -1.0, 0.0, 0.0, 0.0], q: [-5.0, 1.0, 0.0, 0.0, 0.0, 0.0] };
        let err = certify(&rot, [5.0, -6.0], &SECTOR, 4000).unwrap_err();
        assert!(err.positive > 0 && err.negative > 0);
        assert!(!err.offending.is_empty());
    }

    #[test]
    fn perturbed_leading_coefficient_is_reported() {
        for pp in [ParityPoint::Even, ParityPoint::Odd] {
            let mut h = pp.conic(RootBranch::Absolute);
            h.a += 1.0;
            let err = conic_certificate(&pp.param_point(), &h, 10_000).unwrap_err();
            assert_eq!(err.conic, h);
            assert!(!err.reason.is_empty());
        }
        let out = FloatSystem { p: [-5.0, 1.0, 0.0, 0.0, 0.0, 0.0], q: [6.0, 0.0, 1.0, 0.0, 0.0, 0.0] };
        // b² < 4a: the certified hyperbola becomes an ellipse.
        let h = Conic { a: SECTOR.a + 1.0, ..SECTOR };
        let err = certify(&out, [5.0, -6.0], &h, 4000).unwrap_err();
        assert!(err.reason.contains("no real"), "{err}");
    }
}
