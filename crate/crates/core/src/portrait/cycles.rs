//! First-return maps on rays from a focus and limit-cycle isolation.

use serde::Serialize;

use crate::qsystem::FloatSystem;
use crate::singular::SingularKind;

use super::integrate::{dopri5, to_plane, to_sphere, Control, Settings};
use super::skeleton::{Place, SkeletonPoint};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReturnSample {
    pub r: f64,
    pub image: Option<f64>,
}

impl ReturnSample {
    pub fn displacement(&self) -> Option<f64> {
        self.image.map(|i| i - self.r)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReturnMap {
    pub focus: [f64; 2],
    pub direction: [f64; 2],
    pub samples: Vec<ReturnSample>,
    /// Radii of the isolated fixed points along the ray.
    pub fixed_points: Vec<f64>,
}

impl ReturnMap {
    /// Sign changes of the displacement over consecutive defined samples.
    pub fn sign_changes(&self) -> usize {
        let signs: Vec<f64> = self
            .samples
            .iter()
            .filter_map(|s| s.displacement())
            .filter(|d| *d != 0.0)
            .map(f64::signum)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Sign of the displacement closest to the focus.
    pub fn inner_sign(&self) -> Option<f64> {
        self.samples.iter().find_map(|s| s.displacement()).map(f64::signum)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitCycle {
    pub focus: usize,
    /// Crossing with the transversal ray.
    pub point: [f64; 2],
    pub radius: f64,
    /// Closest approach of the cycle to its focus.
    pub inner_distance: f64,
    /// `+1` when the cycle repels nearby orbits (displacement goes − → +).
    pub stability: i32,
}

/// Angle of `(x, y)` about the focus, measured from the ray direction.
fn angle(focus: [f64; 2], dir: [f64; 2], x: f64, y: f64) -> f64 {
    let (dx, dy) = (x - focus[0], y - focus[1]);
    let c = dx * dir[0] + dy * dir[1];
    let s = dir[0] * dy - dir[1] * dx;
    s.atan2(c)
}

/// Distance from the focus along the ray at which the orbit started at
/// radius `r` first returns after one full turn.
pub fn first_return(
    s: &FloatSystem,
    focus: [f64; 2],
    dir: [f64; 2],
    r: f64,
    settings: &Settings,
) -> Option<f64> {
    turn(s, focus, dir, r, settings).map(|t| t.0)
}

/// One turn about the focus: return radius and closest approach.
fn turn(
    s: &FloatSystem,
    focus: [f64; 2],
    dir: [f64; 2],
    r: f64,
    settings: &Settings,
) -> Option<(f64, f64)> {
    let x0 = focus[0] + r * dir[0];
    let y0 = focus[1] + r * dir[1];
    let settings = Settings {
        max_steps: settings.max_steps.min(40_000),
        ..*settings
    };
    let mut total = 0.0;
    let mut prev_angle = 0.0;
    let mut crossing: Option<[f64; 3]> = None;
    let mut failed = false;
    let mut closest = r;
    dopri5(
        |y: &[f64; 3]| s.sphere(*y),
        to_sphere(x0, y0),
        &settings,
        |y| {
            let n = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            for v in y.iter_mut() {
                *v /= n;
            }
        },
        |_, prev, y| {
            if y[2] < 1e-4 {
                failed = true;
                return Control::Stop;
            }
            let (x, yy) = to_plane(y);
            let d = (x - focus[0]).hypot(yy - focus[1]);
            closest = closest.min(d);
            if d < 1e-9 * r.max(1e-300) {
                failed = true;
                return Control::Stop;
            }
            let a = angle(focus, dir, x, yy);
            let mut da = a - prev_angle;
            while da > std::f64::consts::PI {
                da -= std::f64::consts::TAU;
            }
            while da < -std::f64::consts::PI {
                da += std::f64::consts::TAU;
            }
            total += da;
            prev_angle = a;
            if total.abs() >= std::f64::consts::TAU {
                crossing = Some(*prev);
                total -= da;
                return Control::Stop;
            }
            Control::Continue
        },
    );
    if failed {
        return None;
    }
    let start = crossing?;
    // Finish the turn with the angle as independent variable.
    let (mut x, mut y) = to_plane(&start);
    let target = std::f64::consts::TAU * total.signum();
    let theta0 = total;
    let steps = 16;
    let h = (target - theta0) / steps as f64;
    let rhs = |x: f64, y: f64| -> Option<(f64, f64)> {
        let (p, q) = s.eval(x, y);
        let (dx, dy) = (x - focus[0], y - focus[1]);
        let rr = dx * dx + dy * dy;
        let w = (dx * q - dy * p) / rr;
        if w.abs() < 1e-300 {
            return None;
        }
        Some((p / w, q / w))
    };
    for _ in 0..steps {
        let k1 = rhs(x, y)?;
        let k2 = rhs(x + 0.5 * h * k1.0, y + 0.5 * h * k1.1)?;
        let k3 = rhs(x + 0.5 * h * k2.0, y + 0.5 * h * k2.1)?;
        let k4 = rhs(x + h * k3.0, y + h * k3.1)?;
        x += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        y += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        closest = closest.min((x - focus[0]).hypot(y - focus[1]));
    }
    Some(((x - focus[0]) * dir[0] + (y - focus[1]) * dir[1], closest))
}

/// Samples the return map on `n` geometrically spaced radii in `[r_min, r_max]`
/// and bisects every displacement sign change to relative tolerance 1e−9.
pub fn return_map(
    s: &FloatSystem,
    focus: [f64; 2],
    dir: [f64; 2],
    r_min: f64,
    r_max: f64,
    n: usize,
    settings: &Settings,
) -> ReturnMap {
    let ratio = (r_max / r_min).powf(1.0 / (n.max(2) - 1) as f64);
    let samples: Vec<ReturnSample> = {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let r = r_min * ratio.powi(i as i32);
                ReturnSample {
                    r,
                    image: first_return(s, focus, dir, r, settings),
                }
            })
            .collect()
    };
    let mut fixed_points = Vec::new();
    let defined: Vec<(f64, f64)> = samples
        .iter()
        .filter_map(|s| s.displacement().map(|d| (s.r, d)))
        .collect();
    for w in defined.windows(2) {
        let ((mut a, da), (mut b, db)) = (w[0], w[1]);
        if da == 0.0 || db == 0.0 || da.signum() == db.signum() {
            continue;
        }
        let sa = da.signum();
        let mut ok = true;
        while (b - a) > 1e-9 * b {
            let mid = 0.5 * (a + b);
            match first_return(s, focus, dir, mid, settings) {
                Some(img) => {
                    if (img - mid).signum() == sa {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            fixed_points.push(0.5 * (a + b));
        }
    }
    ReturnMap {
        focus,
        direction: dir,
        samples,
        fixed_points,
    }
}

/// Ray from the focus pointing away from the nearest other finite point.
pub fn default_ray(pts: &[SkeletonPoint], focus: &SkeletonPoint) -> ([f64; 2], [f64; 2], f64) {
    let Place::Finite { x, y } = focus.place else {
        unreachable!("finite focus")
    };
    let nearest = pts
        .iter()
        .filter(|p| p.id != focus.id)
        .filter_map(|p| match p.place {
            Place::Finite { x: a, y: b } => Some((a, b)),
            _ => None,
        })
        .map(|(a, b)| (a - x, b - y))
        .min_by(|u, v| u.0.hypot(u.1).partial_cmp(&v.0.hypot(v.1)).unwrap());
    let (dir, scale) = match nearest {
        Some((dx, dy)) => {
            let d = dx.hypot(dy);
            ([-dx / d, -dy / d], d)
        }
        None => ([1.0, 0.0], 1.0),
    };
    ([x, y], dir, scale)
}

/// Number of return-map samples per focus.
pub const RETURN_SAMPLES: usize = 48;

pub fn focus_return_map(s: &FloatSystem, pts: &[SkeletonPoint], focus: &SkeletonPoint, settings: &Settings) -> ReturnMap {
    let (f, dir, scale) = default_ray(pts, focus);
    return_map(s, f, dir, 1e-3 * scale, 50.0 * scale, RETURN_SAMPLES, settings)
}

/// Limit cycles around every finite focus (strong or weak).
pub fn limit_cycles(s: &FloatSystem, pts: &[SkeletonPoint], settings: &Settings) -> Vec<LimitCycle> {
    let mut out = Vec::new();
    for p in pts.iter().filter(|p| {
        !p.place.is_infinite() && matches!(p.kind, SingularKind::Focus | SingularKind::WeakFocus)
    }) {
        let map = focus_return_map(s, pts, p, settings);
        for r in &map.fixed_points {
            let below = map
                .samples
                .iter()
                .rev()
                .filter(|x| x.r < *r)
                .find_map(|x| x.displacement())
                .unwrap_or(0.0);
            let inner_distance = turn(s, map.focus, map.direction, *r, settings).map_or(*r, |t| t.1);
            out.push(LimitCycle {
                focus: p.id,
                point: [map.focus[0] + r * map.direction[0], map.focus[1] + r * map.direction[1]],
                radius: *r,
                inner_distance,
                stability: if below < 0.0 { 1 } else { -1 },
            });
        }
    }
    out
}
