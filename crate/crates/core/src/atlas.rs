//! Region-labelled sweeps over several slices: every region of each traced
//! slice is classified at its representative point.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::AlgNum;
use crate::bifurcation::{trace_slice, SignVector, Window};
use crate::classify::{invariants, label, InvariantTuple};
use crate::error::{Error, Result};
use crate::portrait::skeleton;
use crate::qsystem::ParamPoint;

/// Environment variable capping the sweep's worker threads.
pub const THREADS_VAR: &str = "TN_ATLAS_THREADS";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Classified,
    Unclassified,
    Inconclusive,
    Failed,
}

#[derive(Clone, Debug, Serialize)]
pub struct AtlasRegion {
    pub id: usize,
    pub sign_vector: SignVector,
    pub representative: [f64; 2],
    pub representative_exact: [String; 2],
    pub cells: usize,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple: Option<InvariantTuple>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AtlasSlice {
    pub k: AlgNum,
    pub k_approx: f64,
    pub regions: Vec<AtlasRegion>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Atlas {
    pub window: Window,
    pub grid: usize,
    pub slices: Vec<AtlasSlice>,
}

impl Atlas {
    /// Regions whose label could not be assigned.
    pub fn flagged(&self) -> impl Iterator<Item = (&AtlasSlice, &AtlasRegion)> {
        self.slices
            .iter()
            .flat_map(|s| s.regions.iter().map(move |r| (s, r)))
            .filter(|(_, r)| r.status != Status::Classified)
    }
}

fn classify_region(p: &ParamPoint) -> (Status, Option<InvariantTuple>, Option<String>, Option<String>) {
    let sk = match skeleton(p) {
        Ok(sk) => sk,
        Err(e) => return (Status::Failed, None, None, Some(e.to_string())),
    };
    let t = match invariants(&sk) {
        Ok(t) => t,
        Err(e) => return (Status::Inconclusive, None, None, Some(e.to_string())),
    };
    match label(&t) {
        Ok(l) => (Status::Classified, Some(t), Some(l.to_string()), None),
        Err(e) => (Status::Unclassified, Some(t), None, Some(e.to_string())),
    }
}

fn sweep(ks: &[AlgNum], window: Window, grid: usize) -> Result<Atlas> {
    let mut slices = Vec::new();
    for k in ks {
        if k.sign() < 0 {
            return Err(Error::Unsupported(format!("k = {k} is negative")));
        }
        let diagram = trace_slice(k, window, grid)?;
        let regions = diagram
            .regions
            .par_iter()
            .map(|r| {
                let [m, n] = r.representative_rat();
                let p = ParamPoint::new(m.into(), n.into(), k.clone()).expect("rational m, n");
                let (status, tuple, label, diagnostic) = classify_region(&p);
                AtlasRegion {
                    id: r.id,
                    sign_vector: r.sign_vector,
                    representative: r.representative,
                    representative_exact: r.representative_exact.clone(),
                    cells: r.cells,
                    status,
                    tuple,
                    label,
                    diagnostic,
                }
            })
            .collect();
        slices.push(AtlasSlice {
            k: k.clone(),
            k_approx: k.to_f64(),
            regions,
        });
    }
    Ok(Atlas { window, grid, slices })
}

/// Classifies every region of the slices `ks` traced at resolution `grid`.
/// Parallel over regions; `TN_ATLAS_THREADS` caps the worker count. The
/// result does not depend on the thread count.
pub fn atlas(ks: &[AlgNum], window: Window, grid: usize) -> Result<Atlas> {
    let threads = std::env::var(THREADS_VAR).ok().and_then(|v| v.parse::<usize>().ok()).filter(|t| *t > 0);
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
            pool.install(|| sweep(ks, window, grid))
        }
        None => sweep(ks, window, grid),
    }
}
