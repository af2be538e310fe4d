//! Numerical location of separatrix connections (the non-algebraic
//! bifurcation surface) by bisection on a discrete side functional.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qsystem::ParamPoint;
use crate::singular::SingularKind;

use super::skeleton::{skeleton, Skeleton};

/// Where the stable separatrices of the infinite saddles come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// Every stable saddle separatrix starts outside the focus basin.
    Outside,
    /// Some stable saddle separatrix is born at the finite focus.
    FromFocus,
}

/// Side of the connection for a complete skeleton with six infinite points;
/// `None` elsewhere.
pub fn connection_side(sk: &Skeleton) -> Option<Side> {
    if sk.partial || sk.infinite().count() != 6 {
        return None;
    }
    let focus = |id: usize| {
        sk.points
            .iter()
            .any(|p| p.id == id && !p.place.is_infinite() && matches!(p.kind, SingularKind::Focus | SingularKind::WeakFocus))
    };
    let from_focus = sk.separatrices.iter().any(|s| {
        !s.unstable
            && sk.points[s.source].place.is_infinite()
            && sk.points[s.source].kind == SingularKind::Saddle
            && s.target().is_some_and(focus)
    });
    Some(if from_focus { Side::FromFocus } else { Side::Outside })
}

fn side_at(p: [f64; 3]) -> Option<Side> {
    skeleton(&ParamPoint::from_f64(p[0], p[1], p[2])).ok().as_ref().and_then(connection_side)
}

fn lerp(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])]
}

#[derive(Clone, Debug, Serialize)]
pub struct Connection {
    pub param: [f64; 3],
    /// Width of the final bracket in parameter space.
    pub residual: f64,
    /// Bracket ends at width ≈ 1e−1 of the initial segment, far enough from
    /// the connection for portraits on both sides to resolve.
    pub witness_outside: [f64; 3],
    pub witness_from_focus: [f64; 3],
}

/// Bisects the segment `a`–`b` (sides must differ) down to bracket width `tol`.
pub fn locate_connection(a: [f64; 3], b: [f64; 3], tol: f64) -> Result<Connection> {
    let (sa, sb) = (side_at(a), side_at(b));
    let (mut lo, mut hi) = match (sa, sb) {
        (Some(Side::Outside), Some(Side::FromFocus)) => (a, b),
        (Some(Side::FromFocus), Some(Side::Outside)) => (b, a),
        _ => {
            return Err(Error::Inconclusive(format!(
                "segment ends do not bracket a connection ({sa:?}, {sb:?})"
            )))
        }
    };
    let span = dist(&lo, &hi);
    let mut witness = None;
    while dist(&lo, &hi) > tol {
        if witness.is_none() && dist(&lo, &hi) < 0.1 * span {
            witness = Some((lo, hi));
        }
        let mid = lerp(lo, hi, 0.5);
        match side_at(mid) {
            Some(Side::Outside) => lo = mid,
            Some(Side::FromFocus) => hi = mid,
            None => {
                return Err(Error::Inconclusive(format!("side undetermined at {mid:?}")));
            }
        }
    }
    let (wo, wf) = witness.unwrap_or((lo, hi));
    Ok(Connection {
        param: lerp(lo, hi, 0.5),
        residual: dist(&lo, &hi),
        witness_outside: wo,
        witness_from_focus: wf,
    })
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// `m` at which the escape surface meets the weak-focus plane for `k > 0`.
pub fn contact_m(k: f64) -> f64 {
    -(k * k + 4.0) / (2.0 * k)
}

/// Connection curve in the slice `k`, restricted to `m ∈ m_range` and
/// `n ≥ n_min`, as a polyline of `(m, n, residual)`. Vertical lines are
/// placed quadratically denser towards the contact point; on each, the
/// first `Outside → FromFocus` change below the weak-focus line is bisected
/// to `tol`.
pub fn trace_connection_curve(k: f64, m_range: (f64, f64), n_min: f64, lines: usize, tol: f64) -> Vec<[f64; 3]> {
    let m0 = contact_m(k);
    let n_weak = -(8.0 + k * k) / 4.0;
    let m_far = m_range.0;
    if m_far.partial_cmp(&m0) != Some(std::cmp::Ordering::Less) || n_min.partial_cmp(&n_weak) != Some(std::cmp::Ordering::Less) {
        return vec![];
    }
    const ROWS: usize = 40;
    let mut out: Vec<[f64; 3]> = (1..=lines)
        .into_par_iter()
        .filter_map(|j| {
            let m = m0 - (m0 - m_far) * (j as f64 / lines as f64).powi(2);
            if m > m_range.1 {
                return None;
            }
            let mut prev: Option<([f64; 3], Side)> = None;
            for i in 1..=ROWS {
                let p = [m, n_weak - (n_weak - n_min) * (i as f64 / ROWS as f64).powi(2), k];
                let Some(s) = side_at(p) else {
                    prev = None;
                    continue;
                };
                if let Some((q, Side::Outside)) = prev {
                    if s == Side::FromFocus {
                        return locate_connection(q, p, tol).ok().map(|c| [c.param[0], c.param[1], c.residual]);
                    }
                }
                prev = Some((p, s));
            }
            None
        })
        .collect();
    out.sort_by(|a, b| b[0].total_cmp(&a[0]));
    out
}
