//! Dormand–Prince 5(4) integration and orbit tracking on the Poincaré
//! hemisphere.

use serde::Serialize;

use crate::qsystem::FloatSystem;

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
    pub t_max: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            rtol: 1e-10,
            atol: 1e-12,
            h_max: 1.0,
            max_steps: 200_000,
            t_max: 1e14,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunEnd {
    Stopped,
    StepBudget,
    TimeLimit,
    Underflow,
}

#[derive(Clone, Copy, Debug)]
pub struct Run<const N: usize> {
    pub end: RunEnd,
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Adaptive DOPRI5 run of `ẏ = f(y)`. `on_step(t, previous, current)` is
/// called after every accepted step; `post` may project the new state.
pub fn dopri5<const N: usize>(
    f: impl Fn(&[f64; N]) -> [f64; N],
    y0: [f64; N],
    settings: &Settings,
    post: impl Fn(&mut [f64; N]),
    mut on_step: impl FnMut(f64, &[f64; N], &[f64; N]) -> Control,
) -> Run<N> {
    let mut t = 0.0;
    let mut y = y0;
    let mut k1 = f(&y);
    let norm = k1.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut h = if norm > 0.0 { (1e-3 / norm).min(settings.h_max) } else { settings.h_max };
    let mut steps = 0;
    let mut attempts = 0;
    loop {
        if steps >= settings.max_steps || attempts >= 4 * settings.max_steps {
            return Run { end: RunEnd::StepBudget, t, y, steps };
        }
        if t >= settings.t_max {
            return Run { end: RunEnd::TimeLimit, t, y, steps };
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Run { end: RunEnd::Underflow, t, y, steps };
        }
        attempts += 1;
        let k2 = f(&axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(&axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(&axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(&axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(&axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y_new = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(&y_new);
        let mut err = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = settings.atol + settings.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc) * (e / sc);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            h *= 0.2;
            continue;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        if err <= 1.0 {
            let prev = y;
            y = y_new;
            post(&mut y);
            t += h;
            steps += 1;
            k1 = if y == y_new { k7 } else { f(&y) };
            if on_step(t, &prev, &y) == Control::Stop {
                return Run { end: RunEnd::Stopped, t, y, steps };
            }
            h = (h * fac).min(settings.h_max);
        } else {
            h *= fac.min(1.0);
        }
    }
}

/// Sphere point of the finite point `(x, y)`.
pub fn to_sphere(x: f64, y: f64) -> [f64; 3] {
    let r = (1.0 + x * x + y * y).sqrt();
    [x / r, y / r, 1.0 / r]
}

/// Finite coordinates of a sphere point with `Z > 0`.
pub fn to_plane(s: &[f64; 3]) -> (f64, f64) {
    (s[0] / s[2], s[1] / s[2])
}

pub fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn project(y: &mut [f64; 3]) {
    let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
    for v in y.iter_mut() {
        *v /= r;
    }
    if y[2] < 0.0 {
        y[2] = 0.0;
    }
}

/// A singular point an orbit may terminate at.
#[derive(Clone, Debug)]
pub struct Target {
    pub sphere: [f64; 3],
    /// Capture radius for points attracting in the integration direction
    /// (nodes, foci); zero when capture needs the ε-approach.
    pub trap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Terminal {
    Singularity { id: usize },
    /// Orbit keeps circulating in the finite plane: limit set is a cycle.
    Recurrent,
    Inconclusive { reason: RunEnd },
}

#[derive(Clone, Debug)]
pub struct Orbit {
    pub path: Vec<[f64; 3]>,
    pub terminal: Terminal,
    pub time: f64,
}

/// Distance at which an orbit is attributed to a singular point.
pub const APPROACH_EPS: f64 = 1e-6;

/// Integrates on the hemisphere from `start` in time direction `direction`
/// (±1) until an approach to one of `targets`, or the budget runs out.
/// `source` is ignored until the orbit has left its neighbourhood.
pub fn integrate(
    s: &FloatSystem,
    start: [f64; 3],
    direction: f64,
    targets: &[Target],
    source: Option<usize>,
    settings: &Settings,
) -> Orbit {
    let mut path = vec![start];
    let mut hit = None;
    let mut left = source.is_none();
    let mut entered = vec![false; targets.len()];
    let f = |y: &[f64; 3]| {
        let v = s.sphere(*y);
        [direction * v[0], direction * v[1], direction * v[2]]
    };
    let run = dopri5(f, start, settings, project, |_, _, y| {
        path.push(*y);
        if let Some(src) = source {
            if !left && distance(y, &targets[src].sphere) > 1e-4 {
                left = true;
            }
        }
        for (i, tg) in targets.iter().enumerate() {
            if Some(i) == source && !left {
                continue;
            }
            let d = distance(y, &tg.sphere);
            if d < APPROACH_EPS {
                hit = Some(i);
                return Control::Stop;
            }
            if tg.trap > 0.0 {
                if d < tg.trap / 4.0 && entered[i] {
                    hit = Some(i);
                    return Control::Stop;
                }
                if d < tg.trap {
                    entered[i] = true;
                } else if d > 2.0 * tg.trap {
                    entered[i] = false;
                }
            }
        }
        Control::Continue
    });
    let terminal = match hit {
        Some(id) => Terminal::Singularity { id },
        None => Terminal::Inconclusive { reason: run.end },
    };
    Orbit {
        path,
        terminal,
        time: run.t,
    }
}

/// Keeps at most `max` vertices spaced evenly in arc length (endpoints
/// included), so slow approaches do not crowd out fast transits.
pub fn decimate(path: &[[f64; 3]], max: usize) -> Vec<[f64; 3]> {
    if path.len() <= max || max < 2 {
        return path.to_vec();
    }
    let mut cum = Vec::with_capacity(path.len());
    let mut total = 0.0;
    cum.push(0.0);
    for w in path.windows(2) {
        total += distance(&w[0], &w[1]);
        cum.push(total);
    }
    let mut out = Vec::with_capacity(max);
    let mut j = 0;
    for i in 0..max - 1 {
        let target = total * i as f64 / (max - 1) as f64;
        while j + 1 < path.len() && cum[j] < target {
            j += 1;
        }
        if out.last() != Some(&path[j]) {
            out.push(path[j]);
        }
    }
    out.push(path[path.len() - 1]);
    out
}
