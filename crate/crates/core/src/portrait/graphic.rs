//! Graphics: closed chains of saddle-type points joined by separatrices and
//! equator arcs with coherent orientation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qsystem::{tn_system, ParamPoint};

use super::skeleton::{Separatrix, Skeleton, SkeletonPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GraphicEdge {
    /// Separatrix with the given index in `Skeleton::separatrices`.
    Separatrix { index: usize },
    Equator,
}

#[derive(Clone, Debug, Serialize)]
pub struct Graphic {
    /// Singular points in flow order; the last one connects back to the first.
    pub vertices: Vec<usize>,
    pub edges: Vec<GraphicEdge>,
    /// Sum of indices of the finite points enclosed.
    pub enclosed_index: i32,
}

#[derive(Clone, Copy, Debug)]
struct Edge {
    from: usize,
    to: usize,
    kind: GraphicEdge,
    /// Start angle and signed sweep of an equator arc.
    arc: (f64, f64),
}

fn vertex_ok(p: &SkeletonPoint) -> bool {
    !p.is_antisaddle()
}

/// Point the separatrix really connects to: its terminal, or with
/// `tol > 0` the first saddle-type point it passes within `tol` of.
pub(crate) fn endpoint(sk: &Skeleton, s: &Separatrix, tol: f64) -> Option<usize> {
    if tol > 0.0 {
        let src = sk.points[s.source].disc;
        let mut left = false;
        for q in &s.path {
            left |= (q[0] - src[0]).hypot(q[1] - src[1]) > 10.0 * tol;
            for p in sk.points.iter().filter(|p| vertex_ok(p) && (left || p.id != s.source)) {
                if (q[0] - p.disc[0]).hypot(q[1] - p.disc[1]) < tol {
                    return Some(p.id);
                }
            }
        }
    }
    s.target()
}

fn equator_edges(sk: &Skeleton) -> Vec<Edge> {
    let order = &sk.equator_order;
    if order.len() < 2 {
        return vec![];
    }
    let [m, n, k] = sk.params;
    let fs = tn_system(&ParamPoint::from_f64(m, n, k)).float();
    let mut out = Vec::new();
    for i in 0..order.len() {
        let (a, b) = (&sk.points[order[i]], &sk.points[order[(i + 1) % order.len()]]);
        let (ta, mut tb) = (a.clockwise_angle(), b.clockwise_angle());
        if tb <= ta {
            tb += std::f64::consts::TAU;
        }
        let t = 0.5 * (ta + tb);
        let v = fs.sphere([t.sin(), t.cos(), 0.0]);
        let along = v[0] * t.cos() - v[1] * t.sin();
        let (from, to, arc) = if along > 0.0 { (a.id, b.id, (ta, tb - ta)) } else { (b.id, a.id, (tb, ta - tb)) };
        if vertex_ok(a) && vertex_ok(b) && along != 0.0 {
            out.push(Edge { from, to, kind: GraphicEdge::Equator, arc });
        }
    }
    out
}

fn separatrix_edges(sk: &Skeleton, tol: f64) -> Vec<Edge> {
    let mut out: Vec<Edge> = Vec::new();
    for (index, s) in sk.separatrices.iter().enumerate() {
        let Some(t) = endpoint(sk, s, tol) else { continue };
        if !vertex_ok(&sk.points[t]) || !vertex_ok(&sk.points[s.source]) {
            continue;
        }
        let (from, to) = if s.unstable { (s.source, t) } else { (t, s.source) };
        // One connection found from both ends is a single edge.
        if out.iter().any(|e| e.from == from && e.to == to) && from != to {
            continue;
        }
        out.push(Edge { from, to, kind: GraphicEdge::Separatrix { index }, arc: (0.0, 0.0) });
    }
    out
}

fn polyline(sk: &Skeleton, cycle: &[Edge]) -> Vec<[f64; 2]> {
    let mut pts = Vec::new();
    for e in cycle {
        match e.kind {
            GraphicEdge::Separatrix { index } => {
                let s = &sk.separatrices[index];
                let mut path = s.path.clone();
                if s.source != e.from {
                    path.reverse();
                }
                pts.extend(path);
            }
            GraphicEdge::Equator => {
                let (t0, sweep) = e.arc;
                pts.extend((0..=32).map(|j| {
                    let t = t0 + sweep * j as f64 / 32.0;
                    [t.sin(), t.cos()]
                }));
            }
        }
    }
    pts
}

fn inside(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let mut c = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + n - 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0] {
            c = !c;
        }
    }
    c
}

/// Graphics of a complete skeleton. `tol` (disc metric) lets a separatrix
/// passing that close to a saddle count as connecting to it, for parameters
/// located on a connection numerically; use `0.0` for exact attribution.
pub fn detect_graphics(sk: &Skeleton, tol: f64) -> Result<Vec<Graphic>> {
    if sk.partial {
        return Err(Error::Inconclusive("graphics need a complete skeleton".into()));
    }
    let mut edges = separatrix_edges(sk, tol);
    edges.extend(equator_edges(sk));
    let mut found: Vec<Graphic> = Vec::new();
    let mut seen: Vec<Vec<usize>> = Vec::new();
    // Simple directed cycles containing at least one separatrix, each
    // enumerated from its smallest edge index.
    fn walk(edges: &[Edge], start: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for (i, e) in edges.iter().enumerate().skip(start) {
            if e.from != edges[*path.last().unwrap()].to || path.contains(&i) {
                continue;
            }
            if e.to == edges[start].from {
                let mut c = path.clone();
                c.push(i);
                out.push(c);
                continue;
            }
            if path.iter().any(|j| edges[*j].from == e.to) {
                continue;
            }
            path.push(i);
            walk(edges, start, path, out);
            path.pop();
        }
    }
    let mut cycles = Vec::new();
    for s in 0..edges.len() {
        if edges[s].from == edges[s].to {
            cycles.push(vec![s]);
            continue;
        }
        let mut path = vec![s];
        walk(&edges, s, &mut path, &mut cycles);
    }
    for c in cycles {
        if !c.iter().any(|i| matches!(edges[*i].kind, GraphicEdge::Separatrix { .. })) {
            continue;
        }
        let mut key = c.clone();
        key.sort_unstable();
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        let mut g = Graphic {
            vertices: c.iter().map(|i| edges[*i].from).collect(),
            edges: c.iter().map(|i| edges[*i].kind).collect(),
            enclosed_index: 0,
        };
        let cycle: Vec<Edge> = c.iter().map(|i| edges[*i]).collect();
        let poly = polyline(sk, &cycle);
        g.enclosed_index = sk
            .finite()
            .filter(|p| inside(&poly, p.disc))
            .map(|p| p.index.unwrap_or(0))
            .sum();
        found.push(g);
    }
    Ok(found)
}
