//! Slices `k = k0` of the bifurcation diagram: curve extraction by marching
//! squares and region decomposition by flood fill over cell sign vectors.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::rat::{self, int};
use crate::algebra::{AlgNum, MultiPoly, Rat};
use crate::error::{Error, Result};

use super::{SignVector, SurfaceId, K, M, N};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub m: (f64, f64),
    pub n: (f64, f64),
}

pub const DEFAULT_WINDOW: Window = Window {
    m: (-6.0, 6.0),
    n: (-8.0, 6.0),
};

pub type CurveSegment = [[f64; 2]; 2];

#[derive(Clone, Debug, Serialize)]
pub struct Curve {
    pub surface: String,
    pub color: String,
    /// Multiplicity of the component as a factor of the slice polynomial.
    pub multiplicity: u32,
    pub segments: Vec<CurveSegment>,
    /// Error bound per vertex, when the curve was found numerically.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_bounds: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Region {
    pub id: usize,
    pub sign_vector: SignVector,
    pub representative: [f64; 2],
    pub representative_exact: [String; 2],
    pub cells: usize,
    pub label: Option<String>,
}

impl Region {
    pub fn representative_rat(&self) -> [Rat; 2] {
        self.representative_exact
            .clone()
            .map(|s| rat::parse(&s).expect("stored exactly").0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionEdge {
    pub a: usize,
    pub b: usize,
    pub crossed: Vec<SurfaceId>,
    /// Number of neighbouring cell pairs along the shared boundary.
    pub boundary_cells: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceDiagram {
    pub k0: AlgNum,
    pub k0_approx: f64,
    pub window: Window,
    pub resolution: usize,
    pub curves: Vec<Curve>,
    pub regions: Vec<Region>,
    pub adjacency: Vec<RegionEdge>,
}

/// A factor depending on one coordinate only, with even multiplicity, is
/// invisible to sign changes; such lines are traced explicitly.
#[derive(Clone, Debug)]
struct DoubleLine {
    surface: SurfaceId,
    /// `true` for `n = value`, `false` for `m = value`.
    horizontal: bool,
    value: f64,
    multiplicity: u32,
}

fn double_lines(k0: &AlgNum) -> Result<Vec<DoubleLine>> {
    let Some(k) = k0.as_rat() else {
        return Ok(vec![]);
    };
    let mut out = Vec::new();
    for s in SurfaceId::ALL {
        let f = s.polynomial().specialize(K, &k);
        for (along, other, horizontal) in [(M, N, true), (N, M, false)] {
            let content = f
                .coeffs_in(along)
                .iter()
                .filter(|c| !c.is_zero())
                .map(|c| c.to_unipoly(other))
                .try_fold(None::<crate::algebra::UniPoly>, |acc, c| {
                    let c = c?;
                    Ok::<_, Error>(Some(match acc {
                        None => c,
                        Some(a) => crate::algebra::UniPoly::gcd(&a, &c),
                    }))
                })?;
            let Some(content) = content else { continue };
            if content.degree().unwrap_or(0) == 0 {
                continue;
            }
            for root in content.real_roots(None)?.roots {
                if root.multiplicity % 2 == 0 {
                    let mut r = root.clone();
                    if !r.is_exact() {
                        let mut iso = content.real_roots(Some((r.lo.clone(), r.hi.clone())))?;
                        iso.refine_all(&rat::rat(1, 1 << 50));
                        r = iso.roots[0].clone();
                    }
                    out.push(DoubleLine {
                        surface: s,
                        horizontal,
                        value: r.approx(),
                        multiplicity: root.multiplicity as u32,
                    });
                }
            }
        }
    }
    Ok(out)
}

struct Grid {
    res: usize,
    m0: Rat,
    n0: Rat,
    hm: Rat,
    hn: Rat,
    hm_f: f64,
    hn_f: f64,
    m0_f: f64,
    n0_f: f64,
}

impl Grid {
    fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.m0_f + i as f64 * self.hm_f, self.n0_f + j as f64 * self.hn_f)
    }

    fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.m0_f + (i as f64 + 0.5) * self.hm_f,
            self.n0_f + (j as f64 + 0.5) * self.hn_f,
        )
    }

    fn center_exact(&self, i: usize, j: usize) -> [Rat; 2] {
        let half = rat::rat(1, 2);
        [
            &self.m0 + (int(i as i64) + &half) * &self.hm,
            &self.n0 + (int(j as i64) + &half) * &self.hn,
        ]
    }
}

fn exact_sign(s: SurfaceId, m: &Rat, n: &Rat, k: &AlgNum) -> i8 {
    let pt = crate::qsystem::ParamPoint {
        m: AlgNum::from_rat(m.clone()),
        n: AlgNum::from_rat(n.clone()),
        k: k.clone(),
    };
    super::surface_value(s, &pt).sign() as i8
}

fn sign_at(s: SurfaceId, m: f64, n: f64, mq: impl FnOnce() -> (Rat, Rat), k: &AlgNum, kf: f64) -> i8 {
    let (v, scale) = s.eval_f64(m, n, kf);
    if v.abs() > 1e-9 * scale.max(1.0) {
        v.signum() as i8
    } else {
        let (a, b) = mq();
        exact_sign(s, &a, &b, k)
    }
}

pub fn trace_slice(k0: &AlgNum, window: Window, resolution: usize) -> Result<SliceDiagram> {
    if resolution < 16 {
        return Err(Error::Unsupported("slice resolution must be at least 16".into()));
    }
    if !(window.m.0 < window.m.1 && window.n.0 < window.n.1) {
        return Err(Error::Unsupported("empty window".into()));
    }
    let to_rat = |v: f64| rat::from_f64(v).ok_or_else(|| Error::Unsupported("non-finite window".into()));
    let (m0, m1, n0, n1) = (to_rat(window.m.0)?, to_rat(window.m.1)?, to_rat(window.n.0)?, to_rat(window.n.1)?);
    let res = resolution;
    let hm = (&m1 - &m0) / int(res as i64);
    let hn = (&n1 - &n0) / int(res as i64);
    let grid = Grid {
        res,
        hm_f: rat::to_f64(&hm),
        hn_f: rat::to_f64(&hn),
        m0_f: window.m.0,
        n0_f: window.n.0,
        m0,
        n0,
        hm,
        hn,
    };
    let kf = k0.to_f64();
    let doubles = double_lines(k0)?;

    // Node signs per surface, row-major (j rows of i).
    let node_signs: Vec<Vec<i8>> = SurfaceId::ALL
        .iter()
        .map(|&s| {
            (0..=res)
                .into_par_iter()
                .flat_map_iter(|j| {
                    let g = &grid;
                    (0..=res).map(move |i| {
                        let (m, n) = g.node(i, j);
                        sign_at(
                            s,
                            m,
                            n,
                            || {
                                (
                                    &g.m0 + int(i as i64) * &g.hm,
                                    &g.n0 + int(j as i64) * &g.hn,
                                )
                            },
                            k0,
                            kf,
                        )
                    })
                })
                .collect()
        })
        .collect();

    let cell_sv: Vec<SignVector> = (0..res)
        .into_par_iter()
        .flat_map_iter(|j| {
            let g = &grid;
            (0..res).map(move |i| {
                let (m, n) = g.center(i, j);
                SignVector(SurfaceId::ALL.map(|s| {
                    sign_at(
                        s,
                        m,
                        n,
                        || {
                            let [a, b] = g.center_exact(i, j);
                            (a, b)
                        },
                        k0,
                        kf,
                    )
                }))
            })
        })
        .collect();

    let curves = extract_curves(&grid, &node_signs, &cell_sv, kf, &doubles, window);
    let (regions, adjacency) = decompose(&grid, &cell_sv, &doubles);

    Ok(SliceDiagram {
        k0: k0.clone(),
        k0_approx: kf,
        window,
        resolution,
        curves,
        regions,
        adjacency,
    })
}

fn extract_curves(
    grid: &Grid,
    node_signs: &[Vec<i8>],
    cell_sv: &[SignVector],
    kf: f64,
    doubles: &[DoubleLine],
    window: Window,
) -> Vec<Curve> {
    let res = grid.res;
    let mut curves = Vec::new();
    for (si, &s) in SurfaceId::ALL.iter().enumerate() {
        let signs = &node_signs[si];
        let sg = |i: usize, j: usize| if signs[j * (res + 1) + i] >= 0 { 1i8 } else { -1 };
        let segments: Vec<CurveSegment> = (0..res)
            .into_par_iter()
            .flat_map_iter(|j| {
                let mut out = Vec::new();
                for i in 0..res {
                    let c = [sg(i, j), sg(i + 1, j), sg(i + 1, j + 1), sg(i, j + 1)];
                    if c.iter().all(|&v| v == c[0]) {
                        continue;
                    }
                    let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                    let cross = |e: usize| -> [f64; 2] {
                        let (a, b) = (corners[e], corners[(e + 1) % 4]);
                        let (ma, na) = grid.node(a.0, a.1);
                        let (mb, nb) = grid.node(b.0, b.1);
                        let va = s.eval_f64(ma, na, kf).0;
                        let vb = s.eval_f64(mb, nb, kf).0;
                        let t = if (va - vb).abs() > 0.0 { (va / (va - vb)).clamp(0.0, 1.0) } else { 0.5 };
                        [ma + t * (mb - ma), na + t * (nb - na)]
                    };
                    let edges: Vec<usize> = (0..4).filter(|&e| c[e] != c[(e + 1) % 4]).collect();
                    if edges.len() == 2 {
                        out.push([cross(edges[0]), cross(edges[1])]);
                    } else if edges.len() == 4 {
                        let center = cell_sv[j * res + i].0[si];
                        let center = if center >= 0 { 1 } else { -1 };
                        // Center agreeing with corner 0 joins corners 0 and 2,
                        // so the curve cuts off corners 1 and 3.
                        if center == c[0] {
                            out.push([cross(0), cross(1)]);
                            out.push([cross(2), cross(3)]);
                        } else {
                            out.push([cross(3), cross(0)]);
                            out.push([cross(1), cross(2)]);
                        }
                    }
                }
                out
            })
            .collect();
        curves.push(Curve {
            surface: s.to_string(),
            color: s.color().to_string(),
            multiplicity: 1,
            segments,
            error_bounds: None,
        });
    }
    for d in doubles {
        let seg = if d.horizontal {
            [[window.m.0, d.value], [window.m.1, d.value]]
        } else {
            [[d.value, window.n.0], [d.value, window.n.1]]
        };
        curves.push(Curve {
            surface: d.surface.to_string(),
            color: d.surface.color().to_string(),
            multiplicity: d.multiplicity,
            segments: vec![seg],
            error_bounds: None,
        });
    }
    curves
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

fn separated(grid: &Grid, doubles: &[DoubleLine], a: (usize, usize), b: (usize, usize)) -> Vec<SurfaceId> {
    let (ma, na) = grid.center(a.0, a.1);
    let (mb, nb) = grid.center(b.0, b.1);
    doubles
        .iter()
        .filter(|d| {
            let (x, y) = if d.horizontal { (na, nb) } else { (ma, mb) };
            (x - d.value) * (y - d.value) < 0.0
        })
        .map(|d| d.surface)
        .collect()
}

fn decompose(grid: &Grid, cell_sv: &[SignVector], doubles: &[DoubleLine]) -> (Vec<Region>, Vec<RegionEdge>) {
    let res = grid.res;
    let idx = |i: usize, j: usize| j * res + i;
    let mut dsu = Dsu((0..res * res).collect());
    for j in 0..res {
        for i in 0..res {
            let a = idx(i, j);
            if cell_sv[a].has_zero() {
                continue;
            }
            for (ni, nj) in [(i + 1, j), (i, j + 1)] {
                if ni >= res || nj >= res {
                    continue;
                }
                let b = idx(ni, nj);
                if cell_sv[a] == cell_sv[b] && separated(grid, doubles, (i, j), (ni, nj)).is_empty() {
                    dsu.union(a, b);
                }
            }
        }
    }
    // Components in raster order of their first cell.
    let mut comp_of = vec![usize::MAX; res * res];
    let mut roots: BTreeMap<usize, usize> = BTreeMap::new();
    let mut sizes = Vec::new();
    for c in 0..res * res {
        if cell_sv[c].has_zero() {
            continue;
        }
        let r = dsu.find(c);
        let next = roots.len();
        let id = *roots.entry(r).or_insert(next);
        if id == sizes.len() {
            sizes.push(0usize);
        }
        sizes[id] += 1;
        comp_of[c] = id;
    }
    // Depth from the component boundary; the deepest cell is the representative.
    let mut depth = vec![usize::MAX; res * res];
    let mut queue = VecDeque::new();
    for j in 0..res {
        for i in 0..res {
            let c = idx(i, j);
            if comp_of[c] == usize::MAX {
                continue;
            }
            let on_edge = i == 0 || j == 0 || i + 1 == res || j + 1 == res;
            let boundary = on_edge
                || [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)]
                    .iter()
                    .any(|&(a, b)| comp_of[idx(a, b)] != comp_of[c]);
            if boundary {
                depth[c] = 0;
                queue.push_back((i, j));
            }
        }
    }
    while let Some((i, j)) = queue.pop_front() {
        let c = idx(i, j);
        for (a, b) in [(i.wrapping_sub(1), j), (i + 1, j), (i, j.wrapping_sub(1)), (i, j + 1)] {
            if a >= res || b >= res {
                continue;
            }
            let d = idx(a, b);
            if comp_of[d] == comp_of[c] && depth[d] == usize::MAX {
                depth[d] = depth[c] + 1;
                queue.push_back((a, b));
            }
        }
    }
    let mut best: Vec<Option<(usize, usize)>> = vec![None; sizes.len()];
    for c in 0..res * res {
        let id = comp_of[c];
        if id == usize::MAX {
            continue;
        }
        match best[id] {
            Some((d, _)) if d >= depth[c] => {}
            _ => best[id] = Some((depth[c], c)),
        }
    }
    let regions: Vec<Region> = best
        .iter()
        .enumerate()
        .map(|(id, b)| {
            let (_, c) = b.expect("non-empty component");
            let (i, j) = (c % res, c / res);
            let exact = grid.center_exact(i, j);
            let (m, n) = grid.center(i, j);
            Region {
                id,
                sign_vector: cell_sv[c],
                representative: [m, n],
                representative_exact: exact.clone().map(|r| rat::to_string(&r)),
                cells: sizes[id],
                label: None,
            }
        })
        .collect();
    let mut edges: BTreeMap<(usize, usize), (Vec<SurfaceId>, usize)> = BTreeMap::new();
    for j in 0..res {
        for i in 0..res {
            let a = idx(i, j);
            for (ni, nj) in [(i + 1, j), (i, j + 1)] {
                if ni >= res || nj >= res {
                    continue;
                }
                let b = idx(ni, nj);
                let (ca, cb) = (comp_of[a], comp_of[b]);
                if ca == usize::MAX || cb == usize::MAX || ca == cb {
                    continue;
                }
                let mut crossed = cell_sv[a].differences(&cell_sv[b]);
                for s in separated(grid, doubles, (i, j), (ni, nj)) {
                    if !crossed.contains(&s) {
                        crossed.push(s);
                    }
                }
                crossed.sort();
                let key = (ca.min(cb), ca.max(cb));
                let e = edges.entry(key).or_insert_with(|| (crossed.clone(), 0));
                for s in crossed {
                    if !e.0.contains(&s) {
                        e.0.push(s);
                        e.0.sort();
                    }
                }
                e.1 += 1;
            }
        }
    }
    let adjacency = edges
        .into_iter()
        .map(|((a, b), (crossed, n))| RegionEdge {
            a,
            b,
            crossed,
            boundary_cells: n,
        })
        .collect();
    (regions, adjacency)
}

impl SliceDiagram {
    pub fn add_curve(&mut self, curve: Curve) {
        self.curves.push(curve);
    }

    /// Regions of at least `min_cells` cells (drops resolution artefacts).
    pub fn significant_regions(&self, min_cells: usize) -> impl Iterator<Item = &Region> {
        self.regions.iter().filter(move |r| r.cells >= min_cells)
    }

    pub fn regions_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.regions
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "id": r.id,
                        "sign_vector": r.sign_vector,
                        "representative": r.representative,
                        "representative_exact": r.representative_exact,
                        "label": r.label,
                    })
                })
                .collect(),
        )
    }

    pub fn to_svg(&self, width: u32) -> String {
        let w = self.window;
        let height = (width as f64 * (w.n.1 - w.n.0) / (w.m.1 - w.m.0)).round() as u32;
        let px = |m: f64| (m - w.m.0) / (w.m.1 - w.m.0) * width as f64;
        let py = |n: f64| (w.n.1 - n) / (w.n.1 - w.n.0) * height as f64;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="6" y="16" font-family="sans-serif" font-size="13">k = {} ({:.6})</text>"#,
            self.k0, self.k0_approx
        );
        for c in &self.curves {
            let stroke = if c.multiplicity > 1 { 3.0 } else { 1.2 };
            let _ = write!(
                out,
                r#"<path data-surface="{}" stroke="{}" stroke-width="{stroke}" fill="none" d=""#,
                c.surface, c.color
            );
            for [a, b] in &c.segments {
                let _ = write!(out, "M{:.2} {:.2}L{:.2} {:.2}", px(a[0]), py(a[1]), px(b[0]), py(b[1]));
            }
            let _ = writeln!(out, r#""/>"#);
        }
        for r in &self.regions {
            let (x, y) = (px(r.representative[0]), py(r.representative[1]));
            let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2" fill="gray"/>"#);
            let text = r.label.clone().unwrap_or_else(|| r.id.to_string());
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10">{text}</text>"#,
                x + 3.0,
                y - 3.0
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

/// The slice polynomial of a surface at rational `k0`, in `(m, n)`.
pub fn slice_polynomial(s: SurfaceId, k0: &Rat) -> MultiPoly {
    s.polynomial().specialize(K, k0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slice_zero_lines() {
        let d = trace_slice(&AlgNum::from_int(0), DEFAULT_WINDOW, 64).unwrap();
        // μ|k=0 = −4n: the axis n = 0.
        let s1 = d.curves.iter().find(|c| c.surface == "S1").unwrap();
        assert!(!s1.segments.is_empty());
        assert!(s1.segments.iter().all(|s| s[0][1].abs() < 1e-12 && s[1][1].abs() < 1e-12));
        let s3 = d.curves.iter().find(|c| c.surface == "S3").unwrap();
        assert!(s3.segments.iter().all(|s| (s[0][1] + 2.0).abs() < 1e-12));
        // Double line n = 2 carried by both S5 and S6.
        let doubles: Vec<_> = d.curves.iter().filter(|c| c.multiplicity == 2).collect();
        assert_eq!(doubles.len(), 2);
        assert!(doubles.iter().all(|c| (c.segments[0][0][1] - 2.0).abs() < 1e-12));
    }

    #[test]
    fn adjacent_regions_differ() {
        let d = trace_slice(&AlgNum::from_int(1), DEFAULT_WINDOW, 128).unwrap();
        assert!(!d.regions.is_empty());
        for e in &d.adjacency {
            assert!(!e.crossed.is_empty());
        }
        for r in &d.regions {
            let [m, n] = r.representative_rat();
            let p = crate::qsystem::ParamPoint::rational(m, n, int(1));
            assert_eq!(SignVector::of(&p), r.sign_vector);
        }
    }

    #[test]
    fn rejects_low_resolution() {
        assert!(trace_slice(&AlgNum::from_int(0), DEFAULT_WINDOW, 8).is_err());
    }
}
