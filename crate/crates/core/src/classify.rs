//! Invariant tuples of skeletons and their phase-portrait labels.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::portrait::{endpoint, Separatrix, Skeleton};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantTuple {
    pub i1: u32,
    pub i2: i32,
    pub i3: u32,
    /// Separatrix counts at the infinite points, clockwise from the top-most.
    pub i4: String,
    pub i5: u32,
}

impl fmt::Display for InvariantTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, \"{}\", {})", self.i1, self.i2, self.i3, self.i4, self.i5)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Adornment {
    Plain,
    LimitCycle,
    Graphic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PortraitLabel {
    pub name: String,
    pub adornment: Adornment,
}

impl fmt::Display for PortraitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r) = match self.adornment {
            Adornment::Plain => ('(', ')'),
            Adornment::LimitCycle => ('[', ']'),
            Adornment::Graphic => ('{', '}'),
        };
        write!(f, "{l}{}{r}", self.name)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct TablePattern {
    pub i1: u32,
    pub i2: i32,
    pub i3: u32,
    /// `None` when the row is determined without the digit sequence.
    pub i4: Option<String>,
    pub i5: u32,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Table1Row {
    pub tuple: TablePattern,
    pub label: String,
    pub adornment: Adornment,
    /// Name printed in the geometric table when it differs from the
    /// representative.
    #[serde(default)]
    pub printed_as: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Column {
    Presented,
    Identical,
    Focus,
    NodeFocus,
    WeakPoint,
}

impl Column {
    pub fn description(self) -> &'static str {
        match self {
            Column::Presented => "presented phase portrait",
            Column::Identical => "identical under perturbations",
            Column::Focus => "finite antisaddle focus",
            Column::NodeFocus => "finite antisaddle node-focus",
            Column::WeakPoint => "finite weak point",
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct EquivalenceEntry {
    pub part: String,
    pub representative: String,
    pub column: Column,
    pub dimension: u32,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Tables {
    pub version: u32,
    pub table1: Vec<Table1Row>,
    pub table2: Vec<EquivalenceEntry>,
}

const TABLES_JSON: &str = include_str!("../data/tables.json");

pub fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| serde_json::from_str(TABLES_JSON).expect("embedded tables parse"))
}

/// Digit sequences equal up to rotation and reversal (the start point and
/// sense of the equator depend on how the portrait is drawn).
pub fn dihedral_equal(a: &str, b: &str) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let b: Vec<u8> = b.bytes().collect();
    let n = b.len();
    let rev: Vec<u8> = b.iter().rev().copied().collect();
    let a: Vec<u8> = a.bytes().collect();
    (0..n.max(1)).any(|s| {
        (0..n).all(|i| a[i] == b[(i + s) % n]) || (0..n).all(|i| a[i] == rev[(i + s) % n])
    })
}

/// Lexicographically least rotation/reflection of a digit sequence.
pub fn canonical_i4(s: &str) -> String {
    let b: Vec<u8> = s.bytes().collect();
    let n = b.len();
    let rev: Vec<u8> = b.iter().rev().copied().collect();
    let mut best = b.clone();
    for seq in [&b, &rev] {
        for r in 0..n {
            let cand: Vec<u8> = (0..n).map(|i| seq[(i + r) % n]).collect();
            if cand < best {
                best = cand;
            }
        }
    }
    String::from_utf8(best).expect("ascii digits")
}

impl TablePattern {
    pub fn matches(&self, t: &InvariantTuple) -> bool {
        self.i1 == t.i1
            && self.i2 == t.i2
            && self.i3 == t.i3
            && self.i5 == t.i5
            && self.i4.as_deref().is_none_or(|p| dihedral_equal(p, &t.i4))
    }
}

/// Separatrix counts per infinite point; connections found from both ends
/// are counted once. With `tol > 0` a separatrix passing that close to a
/// saddle-type point is taken to end there.
fn endpoint_counts(sk: &Skeleton, tol: f64) -> BTreeMap<usize, u32> {
    let mut counts: BTreeMap<usize, u32> = sk.infinite().map(|p| (p.id, 0)).collect();
    let seps = &sk.separatrices;
    let ends: Vec<Option<usize>> = seps.iter().map(|s| endpoint(sk, s, tol)).collect();
    let mut duplicate = vec![false; seps.len()];
    // A separatrix passing by a saddle shadows the matching separatrix of
    // that saddle, which is the same orbit at the connection.
    for (i, a) in seps.iter().enumerate() {
        let Some(t) = ends[i].filter(|_| ends[i] != a.target()) else { continue };
        let shadowed = seps
            .iter()
            .enumerate()
            .filter(|(j, b)| *j != i && b.source == t && b.unstable != a.unstable)
            .min_by(|(_, b), (_, c)| gap(a, b).total_cmp(&gap(a, c)));
        if let Some((j, _)) = shadowed {
            duplicate[j] = true;
        }
    }
    for (i, a) in seps.iter().enumerate() {
        for (j, b) in seps.iter().enumerate().skip(i + 1) {
            if duplicate[j] || a.unstable == b.unstable {
                continue;
            }
            let near = ends[i] != a.target() || ends[j] != b.target();
            if ends[i] == Some(b.source) && ends[j] == Some(a.source) && (near || same_orbit(a, b)) {
                duplicate[j] = true;
            }
        }
    }
    for (i, s) in seps.iter().enumerate() {
        if duplicate[i] {
            continue;
        }
        if let Some(c) = counts.get_mut(&s.source) {
            *c += 1;
        }
        if let Some(t) = ends[i] {
            if let Some(c) = counts.get_mut(&t) {
                *c += 1;
            }
        }
    }
    counts
}

/// Distance from the first point of `b` clear of its source to the path of `a`.
fn gap(a: &Separatrix, b: &Separatrix) -> f64 {
    let Some(&src) = b.path.first() else { return f64::INFINITY };
    let near = b.path.iter().find(|q| (q[0] - src[0]).hypot(q[1] - src[1]) > 1e-2).unwrap_or(&src);
    a.path.iter().map(|q| (q[0] - near[0]).hypot(q[1] - near[1])).fold(f64::INFINITY, f64::min)
}

/// Point at fraction `f` of the arc length of a polyline.
fn along(path: &[[f64; 2]], f: f64) -> [f64; 2] {
    let seg = |w: &[[f64; 2]]| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
    let total: f64 = path.windows(2).map(seg).sum();
    let mut left = f * total;
    for w in path.windows(2) {
        let l = seg(w);
        if l >= left && l > 0.0 {
            let t = left / l;
            return [w[0][0] + t * (w[1][0] - w[0][0]), w[0][1] + t * (w[1][1] - w[0][1])];
        }
        left -= l;
    }
    path[path.len() - 1]
}

/// Two separatrices trace one connecting orbit when the interior of one
/// (by arc length) stays on the other.
fn same_orbit(a: &Separatrix, b: &Separatrix) -> bool {
    if a.path.len() < 2 || b.path.len() < 2 {
        return false;
    }
    (1..10).all(|i| {
        let p = along(&a.path, i as f64 / 10.0);
        let q = along(&b.path, 1.0 - i as f64 / 10.0);
        (q[0] - p[0]).hypot(q[1] - p[1]) < 1e-3
    })
}

pub fn invariants(sk: &Skeleton) -> Result<InvariantTuple> {
    invariants_with(sk, 0.0)
}

/// Invariants treating near-passages within `tol` (disc metric) of a
/// saddle-type point as connections; for parameters located on one.
pub fn invariants_with(sk: &Skeleton, tol: f64) -> Result<InvariantTuple> {
    if sk.partial {
        return Err(Error::Inconclusive(format!(
            "partial skeleton: {}",
            sk.diagnostics.join("; ")
        )));
    }
    let i1 = sk.finite().count() as u32;
    let i2 = sk.finite().map(|p| p.index.unwrap_or(0)).sum();
    let i3 = (sk.infinite().count() / 2) as u32;
    let counts = endpoint_counts(sk, tol);
    let i4 = sk
        .equator_order
        .iter()
        .map(|id| char::from_digit(counts[id].min(9), 10).expect("digit"))
        .collect();
    Ok(InvariantTuple {
        i1,
        i2,
        i3,
        i4,
        i5: sk.limit_cycles.len() as u32,
    })
}

pub fn label(t: &InvariantTuple) -> Result<PortraitLabel> {
    tables()
        .table1
        .iter()
        .find(|r| r.tuple.matches(t))
        .map(|r| PortraitLabel {
            name: r.label.clone(),
            adornment: r.adornment,
        })
        .ok_or_else(|| Error::Unclassified(t.to_string()))
}

pub fn equivalence_class(part: &str) -> Result<EquivalenceEntry> {
    tables()
        .table2
        .iter()
        .find(|e| e.part == part)
        .cloned()
        .ok_or_else(|| Error::Data(format!("unknown part name {part}")))
}

/// Table rows whose patterns overlap (should be empty).
pub fn table_collisions() -> Vec<(String, String)> {
    let rows = &tables().table1;
    let mut out = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            let (x, y) = (&a.tuple, &b.tuple);
            let i4_overlap = match (&x.i4, &y.i4) {
                (Some(p), Some(q)) => dihedral_equal(p, q),
                _ => true,
            };
            if x.i1 == y.i1 && x.i2 == y.i2 && x.i3 == y.i3 && x.i5 == y.i5 && i4_overlap {
                out.push((a.label.clone(), b.label.clone()));
            }
        }
    }
    out
}
