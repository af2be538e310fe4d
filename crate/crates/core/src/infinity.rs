//! Singular points at infinity via the Poincaré compactification.
//!
//! Chart fields are written with the orientation of the flow on the side
//! `σ = ±1` of the sphere (`x = σ/z, y = σu/z` in the u-chart,
//! `x = σv/w, y = σ/w` in the v-chart), after multiplying by `z` (resp. `w`).
//! With `C(X, Y, Z) = Y·P − X·Q` the u-chart field restricted to the equator
//! is `u̇ = −σ·C(1, u, 0)`.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{AlgNum, BiPoly, Generator, UniPoly};
use crate::error::{Error, Result};
use crate::qsystem::QuadSystem;
use crate::singular::{classify_point, SemiElementalReport, SingularKind, Stability};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    UChart,
    VChart,
}

/// Chart vector field in coordinates `(u, z)` or `(v, w)`.
#[derive(Clone, Debug)]
pub struct ChartField {
    pub chart: Chart,
    pub sigma: i32,
    pub first: BiPoly,
    pub second: BiPoly,
}

/// `Σ c·X^i·Y^j·Z^(2−i−j)` with `(X, Y, Z)` given as polynomials in the chart variables.
fn homogenized(c: &[AlgNum; 6], x: &BiPoly, y: &BiPoly, z: &BiPoly) -> BiPoly {
    let mons = [
        z.pow(2),
        x * z,
        y * z,
        x.pow(2),
        x * y,
        y.pow(2),
    ];
    mons.iter()
        .zip(c)
        .fold(BiPoly::zero(), |acc, (m, c)| &acc + &m.scale(c))
}

pub fn chart_field(s: &QuadSystem, chart: Chart, sigma: i32) -> ChartField {
    let sg = AlgNum::from_int(sigma as i64);
    let one = BiPoly::constant(AlgNum::from_int(1));
    let a = BiPoly::x();
    let zz = BiPoly::y().scale(&sg);
    let (first, second) = match chart {
        Chart::UChart => {
            let p = homogenized(s.p(), &one, &a, &zz);
            let q = homogenized(s.q(), &one, &a, &zz);
            (
                (&q - &(&a * &p)).scale(&sg),
                (&BiPoly::y() * &p).scale(&-&sg),
            )
        }
        Chart::VChart => {
            let p = homogenized(s.p(), &a, &one, &zz);
            let q = homogenized(s.q(), &a, &one, &zz);
            (
                (&p - &(&a * &q)).scale(&sg),
                (&BiPoly::y() * &q).scale(&-&sg),
            )
        }
    };
    ChartField {
        chart,
        sigma,
        first,
        second,
    }
}

/// The u- or v-chart field on the side `σ = +1`.
pub fn compactified_field(s: &QuadSystem, chart: Chart) -> ChartField {
    chart_field(s, chart, 1)
}

/// `C(1, u, 0) = u·p2(1, u) − q2(1, u)` for rational systems.
pub fn equator_polynomial(s: &QuadSystem) -> Result<UniPoly> {
    let r = |c: &AlgNum| {
        c.as_rat()
            .ok_or_else(|| Error::Unsupported("infinite analysis needs rational coefficients".into()))
    };
    let (p, q) = (s.p(), s.q());
    Ok(UniPoly::new(vec![
        -r(&q[3])?,
        r(&p[3])? - r(&q[4])?,
        r(&p[4])? - r(&q[5])?,
        r(&p[5])?,
    ]))
}

#[derive(Clone, Debug, Serialize)]
pub struct InfiniteSingularity {
    /// Representative `[X : Y]` with `Y ≥ 0` (and `X > 0` when `Y = 0`).
    pub direction: [AlgNum; 2],
    /// Unit vector along `direction`.
    pub approx: [f64; 2],
    pub chart: Chart,
    /// Chart coordinate of the point on the equator (`u` or `v`).
    pub coordinate: AlgNum,
    pub kind: SingularKind,
    pub multiplicity: u32,
    /// Eigenvalue along the equator, for `σ = +1`.
    pub lambda_equator: AlgNum,
    /// Eigenvalue transverse to the equator, for `σ = +1`.
    pub lambda_transverse: AlgNum,
    pub stability: Stability,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semi: Option<SemiElementalReport>,
}

pub fn infinite_singularities(s: &QuadSystem) -> Result<Vec<InfiniteSingularity>> {
    let c = equator_polynomial(s)?;
    if c.is_zero() {
        return Err(Error::Degenerate("the line at infinity is filled with singular points".into()));
    }
    let mut out = Vec::new();
    let uf = compactified_field(s, Chart::UChart);
    let zero = AlgNum::from_int(0);
    if c.degree().unwrap_or(0) > 0 {
        let iso = c.real_roots(None)?;
        let sf = iso.square_free().clone();
        for root in &iso.roots {
            let u0 = match root.exact_value() {
                Some(v) => AlgNum::from_rat(v.clone()),
                None => AlgNum::generator(Arc::new(Generator::new(
                    sf.clone(),
                    root.lo.clone(),
                    root.hi.clone(),
                    "u0",
                )?)),
            };
            let direction = match u0.sign() {
                1 | 0 => [AlgNum::from_int(1), u0.clone()],
                _ => [AlgNum::from_int(-1), -&u0],
            };
            out.push(build(&uf, Chart::UChart, u0, direction, root.multiplicity as u32)?);
        }
    }
    let deg = c.degree().unwrap_or(0) as u32;
    if deg < 3 {
        let vf = compactified_field(s, Chart::VChart);
        out.push(build(
            &vf,
            Chart::VChart,
            zero.clone(),
            [zero, AlgNum::from_int(1)],
            3 - deg,
        )?);
    }
    Ok(out)
}

fn build(
    f: &ChartField,
    chart: Chart,
    coordinate: AlgNum,
    direction: [AlgNum; 2],
    multiplicity: u32,
) -> Result<InfiniteSingularity> {
    let zero = AlgNum::from_int(0);
    let cls = classify_point(&f.first, &f.second, &coordinate, &zero)?;
    let lambda_equator = f.first.dx().eval(&coordinate, &zero);
    let lambda_transverse = f.second.dy().eval(&coordinate, &zero);
    let (dx, dy) = (direction[0].to_f64(), direction[1].to_f64());
    let norm = dx.hypot(dy);
    Ok(InfiniteSingularity {
        approx: [dx / norm, dy / norm],
        direction,
        chart,
        coordinate,
        kind: cls.kind,
        multiplicity,
        lambda_equator,
        lambda_transverse,
        stability: cls.stability,
        semi: cls.semi,
    })
}
