use std::collections::BTreeSet;

use trinode::bifurcation::{key_slices, trace_slice, SignVector, DEFAULT_WINDOW};
use trinode::qsystem::ParamPoint;

/// Sign vectors seen on a dense point grid, skipping points on a surface.
fn scanned(k: &trinode::algebra::AlgNum, steps: usize) -> BTreeSet<String> {
    let w = DEFAULT_WINDOW;
    let mut out = BTreeSet::new();
    for i in 0..=steps {
        for j in 0..=steps {
            let m = w.m.0 + (w.m.1 - w.m.0) * (i as f64 + 0.37) / (steps as f64 + 1.0);
            let n = w.n.0 + (w.n.1 - w.n.0) * (j as f64 + 0.61) / (steps as f64 + 1.0);
            let s = SignVector::at(m, n, k);
            if !s.has_zero() {
                out.insert(s.to_string());
            }
        }
    }
    out
}

#[test]
fn slice_regions_match_dense_scan() {
    // (regions, distinct sign vectors) at resolution 128 on the default window.
    let frozen = [(10, 6), (23, 11), (23, 10), (23, 10)];
    for (k, (regions, distinct)) in key_slices().iter().zip(frozen) {
        let d = trace_slice(k, DEFAULT_WINDOW, 128).unwrap();
        let traced: BTreeSet<String> = d.regions.iter().map(|r| r.sign_vector.to_string()).collect();
        assert_eq!((d.regions.len(), traced.len()), (regions, distinct), "k = {k}");
        assert_eq!(traced, scanned(k, 600), "k = {k}");
    }
}

#[test]
fn representatives_carry_their_sign_vector() {
    for k in key_slices() {
        let d = trace_slice(&k, DEFAULT_WINDOW, 128).unwrap();
        for r in &d.regions {
            let [m, n] = r.representative_rat();
            let p = ParamPoint::new(m.into(), n.into(), k.clone()).unwrap();
            assert_eq!(SignVector::of(&p), r.sign_vector, "k = {k}, region {}", r.id);
        }
        for e in &d.adjacency {
            let (a, b) = (&d.regions[e.a], &d.regions[e.b]);
            assert!(a.sign_vector.differences(&b.sign_vector).len() <= e.crossed.len());
        }
    }
}
