use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{AlgNum, BiPoly};
use crate::error::{Error, Result};
use crate::infinity::{chart_field, equator_polynomial, Chart};
use crate::qsystem::{tn_system, FloatSystem, ParamPoint, QuadSystem};
use crate::singular::{
    classify_point, finite_singularities, SemiElementalReport, SingularKind, Stability,
};

use super::cycles::{limit_cycles, LimitCycle};
use super::integrate::{decimate, distance, integrate, to_plane, to_sphere, Orbit, Settings, Target, Terminal};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "at", rename_all = "kebab-case")]
pub enum Place {
    Finite { x: f64, y: f64 },
    Infinite { chart: Chart, coordinate: f64, sigma: i32 },
}

impl Place {
    /// Sphere point at local offset `(a, b)` (chart coordinates at infinity).
    pub fn embed(&self, a: f64, b: f64) -> [f64; 3] {
        match *self {
            Place::Finite { x, y } => to_sphere(x + a, y + b),
            Place::Infinite { chart, coordinate, sigma } => {
                let s = sigma as f64;
                let v = match chart {
                    Chart::UChart => [s, s * (coordinate + a), b],
                    Chart::VChart => [s * (coordinate + a), s, b],
                };
                let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                [v[0] / r, v[1] / r, v[2] / r]
            }
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinite { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SkeletonPoint {
    pub id: usize,
    pub place: Place,
    pub sphere: [f64; 3],
    pub disc: [f64; 2],
    pub kind: SingularKind,
    pub stability: Stability,
    pub multiplicity: u32,
    /// Topological index (finite points only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<i32>,
    #[serde(skip)]
    pub(crate) branches: Vec<Branch>,
}

impl SkeletonPoint {
    pub fn is_antisaddle(&self) -> bool {
        matches!(
            self.kind,
            SingularKind::Node | SingularKind::Focus | SingularKind::WeakFocus | SingularKind::SemiElementalNode
        )
    }

    /// Clockwise angle on the equator measured from the top of the disc.
    pub fn clockwise_angle(&self) -> f64 {
        self.disc[0].atan2(self.disc[1]).rem_euclid(std::f64::consts::TAU)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Branch {
    /// Local offset as a function of the launch distance.
    direction: [f64; 2],
    /// Quadratic-and-higher correction along the second frame vector
    /// (center branches only): offset = X·kernel + f(X)·eigen.
    center: Option<CenterBranch>,
    unstable: bool,
}

#[derive(Clone, Debug)]
struct CenterBranch {
    sign: f64,
    kernel: [f64; 2],
    eigen: [f64; 2],
    series: Vec<f64>,
}

impl Branch {
    fn offset(&self, delta: f64) -> [f64; 2] {
        match &self.center {
            None => [delta * self.direction[0], delta * self.direction[1]],
            Some(c) => {
                let x = c.sign * delta;
                let y: f64 = c.series.iter().enumerate().map(|(i, v)| v * x.powi(i as i32)).sum();
                [x * c.kernel[0] + y * c.eigen[0], x * c.kernel[1] + y * c.eigen[1]]
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Separatrix {
    pub source: usize,
    pub unstable: bool,
    pub center_branch: bool,
    pub terminal: Terminal,
    /// Orbit on the disc, oriented away from the source.
    pub path: Vec<[f64; 2]>,
}

impl Separatrix {
    pub fn target(&self) -> Option<usize> {
        match self.terminal {
            Terminal::Singularity { id } => Some(id),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Skeleton {
    pub params: [f64; 3],
    pub points: Vec<SkeletonPoint>,
    pub separatrices: Vec<Separatrix>,
    /// Infinite points clockwise from the top-most one.
    pub equator_order: Vec<usize>,
    pub limit_cycles: Vec<LimitCycle>,
    pub partial: bool,
    pub diagnostics: Vec<String>,
}

impl Skeleton {
    pub fn finite(&self) -> impl Iterator<Item = &SkeletonPoint> {
        self.points.iter().filter(|p| !p.place.is_infinite())
    }

    pub fn infinite(&self) -> impl Iterator<Item = &SkeletonPoint> {
        self.points.iter().filter(|p| p.place.is_infinite())
    }

    /// The same skeleton for the time-reversed field.
    pub fn reversed(&self) -> Skeleton {
        let flip = |s: Stability| match s {
            Stability::Stable => Stability::Unstable,
            Stability::Unstable => Stability::Stable,
            Stability::None => Stability::None,
        };
        let mut out = self.clone();
        for p in &mut out.points {
            p.stability = flip(p.stability);
        }
        for s in &mut out.separatrices {
            s.unstable = !s.unstable;
        }
        for c in &mut out.limit_cycles {
            c.stability = -c.stability;
        }
        out
    }
}

fn f64v(v: &[AlgNum; 2]) -> [f64; 2] {
    [v[0].to_f64(), v[1].to_f64()]
}

fn normalized(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

fn eigenvector(j: &[[f64; 2]; 2], lambda: f64) -> [f64; 2] {
    let a = [j[0][1], lambda - j[0][0]];
    let b = [lambda - j[1][1], j[1][0]];
    if a[0].hypot(a[1]) >= b[0].hypot(b[1]) {
        normalized(a)
    } else {
        normalized(b)
    }
}

/// Separatrix branches of a point with local field `(f, g)` at `(a0, b0)`.
/// `half_plane` keeps only branches pointing into `b > 0`.
fn branches(
    kind: SingularKind,
    f: &BiPoly,
    g: &BiPoly,
    a0: f64,
    b0: f64,
    semi: Option<&SemiElementalReport>,
    half_plane: bool,
) -> Vec<Branch> {
    let mut out = Vec::new();
    match kind {
        SingularKind::Saddle => {
            let j = [
                [f.dx().eval_f64(a0, b0), f.dy().eval_f64(a0, b0)],
                [g.dx().eval_f64(a0, b0), g.dy().eval_f64(a0, b0)],
            ];
            let tr = j[0][0] + j[1][1];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
            for lambda in [(tr + disc) / 2.0, (tr - disc) / 2.0] {
                let v = eigenvector(&j, lambda);
                for s in [1.0, -1.0] {
                    out.push(Branch {
                        direction: [s * v[0], s * v[1]],
                        center: None,
                        unstable: lambda > 0.0,
                    });
                }
            }
        }
        SingularKind::SaddleNode | SingularKind::SemiElementalSaddle => {
            let r = semi.expect("semi-elemental report");
            let lambda = r.lambda.to_f64();
            let a = r.a.sign() as f64;
            let kernel = normalized(f64v(&r.kernel));
            let kn = f64v(&r.kernel);
            let scale = kn[0].hypot(kn[1]);
            let eigen = f64v(&r.eigen);
            let ev = normalized(eigen);
            for s in [1.0, -1.0] {
                out.push(Branch {
                    direction: [s * ev[0], s * ev[1]],
                    center: None,
                    unstable: lambda > 0.0,
                });
            }
            let series: Vec<f64> = r
                .center_manifold
                .iter()
                .enumerate()
                .map(|(i, c)| c.to_f64() / scale.powi(i as i32))
                .collect();
            let centre = |sign: f64, unstable: bool| Branch {
                direction: [sign * kernel[0], sign * kernel[1]],
                center: Some(CenterBranch {
                    sign,
                    kernel,
                    eigen,
                    series: series.clone(),
                }),
                unstable,
            };
            if kind == SingularKind::SaddleNode {
                let sign = if lambda < 0.0 { a } else { -a };
                out.push(centre(sign, lambda < 0.0));
            } else {
                out.push(centre(1.0, a > 0.0));
                out.push(centre(-1.0, a > 0.0));
            }
        }
        _ => {}
    }
    if half_plane {
        out.retain(|b| b.offset(1e-6)[1] > 1e-9 * b.offset(1e-6)[0].abs().max(1e-12));
    }
    out
}

fn trap_kind(kind: SingularKind) -> bool {
    matches!(kind, SingularKind::Node | SingularKind::Focus | SingularKind::SemiElementalNode)
}

/// Finite and infinite singular points of the normal form, with launch data.
pub fn singular_points(p: &ParamPoint) -> Result<(QuadSystem, Vec<SkeletonPoint>)> {
    let p = if p.is_rational() { p.clone() } else { p.rationalized() };
    let s = tn_system(&p);
    let mut pts = Vec::new();
    let (pp, qq) = (s.p_poly(), s.q_poly());
    for f in finite_singularities(&s)? {
        if f.kind == SingularKind::Degenerate {
            return Err(Error::Unsupported(format!(
                "degenerate finite singular point at ({}, {})",
                f.x, f.y
            )));
        }
        let (x, y) = (f.approx[0], f.approx[1]);
        let place = Place::Finite { x, y };
        let sphere = place.embed(0.0, 0.0);
        pts.push(SkeletonPoint {
            id: pts.len(),
            place,
            sphere,
            disc: [sphere[0], sphere[1]],
            kind: f.kind,
            stability: f.stability,
            multiplicity: f.multiplicity,
            index: Some(f.index),
            branches: branches(f.kind, &pp, &qq, x, y, f.semi.as_ref(), false),
        });
    }
    let c = equator_polynomial(&s)?;
    if c.is_zero() {
        return Err(Error::Degenerate("line at infinity filled with singular points".into()));
    }
    let mut coords: Vec<(Chart, AlgNum, u32)> = Vec::new();
    for inf in crate::infinity::infinite_singularities(&s)? {
        coords.push((inf.chart, inf.coordinate.clone(), inf.multiplicity));
    }
    for (chart, coord, mult) in coords {
        for sigma in [1, -1] {
            let field = chart_field(&s, chart, sigma);
            let zero = AlgNum::from_int(0);
            let cls = classify_point(&field.first, &field.second, &coord, &zero)?;

            let a0 = coord.to_f64();
            let place = Place::Infinite {
                chart,
                coordinate: a0,
                sigma,
            };
            let sphere = place.embed(0.0, 0.0);
            pts.push(SkeletonPoint {
                id: pts.len(),
                place,
                sphere,
                disc: [sphere[0], sphere[1]],
                kind: cls.kind,
                stability: cls.stability,
                multiplicity: mult,
                index: None,
                branches: branches(cls.kind, &field.first, &field.second, a0, 0.0, cls.semi.as_ref(), true),
            });
        }
    }
    Ok((s, pts))
}

fn targets_for(pts: &[SkeletonPoint], cycles: &[LimitCycle], direction: f64) -> Vec<Target> {
    pts.iter()
        .map(|p| {
            // A focus only captures orbits well inside its innermost cycle.
            let cycle_cap = cycles
                .iter()
                .filter(|c| c.focus == p.id)
                .map(|c| c.inner_distance / 4.0)
                .fold(f64::INFINITY, f64::min);
            let dmin = pts
                .iter()
                .filter(|q| q.id != p.id)
                .map(|q| distance(&p.sphere, &q.sphere))
                .fold(1.0f64, f64::min);
            let attracting = match p.stability {
                Stability::Stable => direction > 0.0,
                Stability::Unstable => direction < 0.0,
                Stability::None => false,
            };
            Target {
                sphere: p.sphere,
                trap: if trap_kind(p.kind) && attracting { (0.25 * dmin).min(0.05).min(cycle_cap) } else { 0.0 },
            }
        })
        .collect()
}

/// Winding (in turns) of the tail of a finite orbit around `(x, y)`.
fn tail_winding(path: &[[f64; 3]], x: f64, y: f64) -> f64 {
    let tail = &path[path.len() / 2..];
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    for s in tail {
        if s[2] < 1e-6 {
            return 0.0;
        }
        let (px, py) = to_plane(s);
        let a = (py - y).atan2(px - x);
        if let Some(b) = prev {
            let mut d = a - b;
            while d > std::f64::consts::PI {
                d -= std::f64::consts::TAU;
            }
            while d < -std::f64::consts::PI {
                d += std::f64::consts::TAU;
            }
            total += d;
        }
        prev = Some(a);
    }
    total / std::f64::consts::TAU
}

const LAUNCH_DELTA: f64 = 1e-7;
const CENTER_DELTA: f64 = 1e-5;
const CENTER_DELTA_MAX: f64 = 1e-3;
const DEGENERATE_CAPTURE: f64 = 1e-3;
const CENTER_H_MAX: f64 = 1e4;

fn launch(
    fs: &FloatSystem,
    pts: &[SkeletonPoint],
    src: usize,
    branch: &Branch,
    cycles: &[LimitCycle],
    settings: &Settings,
) -> Separatrix {
    let point = &pts[src];
    let direction = if branch.unstable { 1.0 } else { -1.0 };
    let mut delta = if branch.center.is_some() { CENTER_DELTA } else { LAUNCH_DELTA };
    let mut start = {
        let o = branch.offset(delta);
        point.place.embed(o[0], o[1])
    };
    if branch.center.is_none() {
        // Halve δ until the reversed orbit returns to the point.
        let back = Settings {
            max_steps: 4000,
            ..*settings
        };
        for _ in 0..6 {
            let tg = [Target {
                sphere: point.sphere,
                trap: 0.0,
            }];
            let d0 = distance(&start, &point.sphere);
            let mut ok = false;
            super::integrate::dopri5(
                |y: &[f64; 3]| {
                    let v = fs.sphere(*y);
                    [-direction * v[0], -direction * v[1], -direction * v[2]]
                },
                start,
                &back,
                |_| {},
                |_, _, y| {
                    let d = distance(y, &tg[0].sphere);
                    if d < 1e-2 * d0 || d < 1e-9 {
                        ok = true;
                        return super::integrate::Control::Stop;
                    }
                    if d > 10.0 * d0 {
                        return super::integrate::Control::Stop;
                    }
                    super::integrate::Control::Continue
                },
            );
            if ok {
                break;
            }
            delta /= 2.0;
            let o = branch.offset(delta);
            start = point.place.embed(o[0], o[1]);
        }
    }
    let targets = targets_for(pts, cycles, direction);
    // Departure along a centre manifold is algebraic; allow long steps.
    let run = if branch.center.is_some() { Settings { h_max: CENTER_H_MAX, ..*settings } } else { *settings };
    let mut orbit: Orbit = integrate(fs, start, direction, &targets, Some(src), &run);
    // Stiff transverse decay plus higher-order departure can pin a centre-branch
    // orbit near its source; restart farther out along the manifold.
    while branch.center.is_some() && delta < CENTER_DELTA_MAX {
        let stuck = matches!(orbit.terminal, Terminal::Inconclusive { .. })
            && orbit.path.last().is_some_and(|e| distance(e, &point.sphere) < 10.0 * delta);
        if !stuck {
            break;
        }
        delta *= 10.0;
        let o = branch.offset(delta);
        start = point.place.embed(o[0], o[1]);
        orbit = integrate(fs, start, direction, &targets, Some(src), &run);
    }
    if let (Terminal::Inconclusive { .. }, Some(end)) = (orbit.terminal, orbit.path.last()) {
        // Approach to a non-elemental point is algebraic, too slow for the ε-ball.
        if let Some(q) = pts
            .iter()
            .find(|q| !q.kind.is_elemental() && q.id != src && distance(end, &q.sphere) < DEGENERATE_CAPTURE)
        {
            orbit.terminal = Terminal::Singularity { id: q.id };
        }
    }
    if let Terminal::Inconclusive { .. } = orbit.terminal {
        let winds = pts
            .iter()
            .filter(|p| !p.place.is_infinite() && p.is_antisaddle())
            .any(|p| {
                let Place::Finite { x, y } = p.place else { unreachable!() };
                tail_winding(&orbit.path, x, y).abs() >= 2.0
            });
        if winds {
            orbit.terminal = Terminal::Recurrent;
        }
    }
    let mut sphere_path = vec![point.sphere];
    sphere_path.extend(orbit.path);
    let path = decimate(&sphere_path, 600).iter().map(|s| [s[0], s[1]]).collect();
    Separatrix {
        source: src,
        unstable: branch.unstable,
        center_branch: branch.center.is_some(),
        terminal: orbit.terminal,
        path,
    }
}

/// Clockwise order of the infinite points starting at the top-most one
/// (ties: smaller clockwise angle from the upward vertical).
pub fn equator_order(pts: &[SkeletonPoint]) -> Vec<usize> {
    let inf: Vec<&SkeletonPoint> = pts.iter().filter(|p| p.place.is_infinite()).collect();
    let Some(top) = inf.iter().copied().max_by(|a, b| {
        a.disc[1]
            .partial_cmp(&b.disc[1])
            .unwrap()
            .then(b.clockwise_angle().partial_cmp(&a.clockwise_angle()).unwrap())
    }) else {
        return vec![];
    };
    let t0 = top.clockwise_angle();
    let mut order: Vec<(f64, usize)> = inf
        .iter()
        .map(|p| ((p.clockwise_angle() - t0).rem_euclid(std::f64::consts::TAU), p.id))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    order.into_iter().map(|(_, i)| i).collect()
}

/// Separatrix skeleton at `p` with default integration settings.
pub fn skeleton(p: &ParamPoint) -> Result<Skeleton> {
    skeleton_with(p, &Settings::default())
}

pub fn skeleton_with(p: &ParamPoint, settings: &Settings) -> Result<Skeleton> {
    let (s, pts) = singular_points(p)?;
    let fs = s.float();
    let jobs: Vec<(usize, Branch)> = pts
        .iter()
        .flat_map(|pt| pt.branches.iter().map(move |b| (pt.id, b.clone())))
        .collect();
    let cycles = limit_cycles(&fs, &pts, settings);
    let separatrices: Vec<Separatrix> = jobs
        .par_iter()
        .map(|(src, b)| launch(&fs, &pts, *src, b, &cycles, settings))
        .collect();
    let mut diagnostics: Vec<String> = pts
        .iter()
        .filter(|q| q.kind == SingularKind::Degenerate)
        .map(|q| format!("infinite point {} is degenerate; no separatrices launched from it", q.id))
        .collect();
    let mut partial = false;
    for (i, sep) in separatrices.iter().enumerate() {
        if let Terminal::Inconclusive { reason } = sep.terminal {
            partial = true;
            diagnostics.push(format!(
                "separatrix {i} from point {} unresolved ({reason:?})",
                sep.source
            ));
        }
    }
    let equator_order = equator_order(&pts);
    Ok(Skeleton {
        params: p.approx(),
        points: pts,
        separatrices,
        equator_order,
        limit_cycles: cycles,
        partial,
        diagnostics,
    })
}
