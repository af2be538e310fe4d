use proptest::prelude::*;
use trinode::algebra::rat::{int, rat};
use trinode::classify::{invariants, invariants_with, label};
use trinode::portrait::integrate::{dopri5, to_plane, to_sphere, Control};
use trinode::portrait::{detect_graphics, return_map, skeleton, Place, Settings, Skeleton};
use trinode::qsystem::{tn_system, FloatSystem, ParamPoint};

fn at(m: (i64, i64), n: (i64, i64), k: i64) -> ParamPoint {
    ParamPoint::rational(rat(m.0, m.1), rat(n.0, n.1), int(k))
}

fn v6() -> ParamPoint {
    at((-75, 16), (-207, 32), 3)
}

fn v1() -> ParamPoint {
    at((57, 16), (73, 32), 3)
}

fn rk4(f: impl Fn(&[f64; 2]) -> [f64; 2], y0: [f64; 2], t: f64, steps: usize) -> [f64; 2] {
    let h = t / steps as f64;
    let mut y = y0;
    let add = |y: &[f64; 2], k: &[f64; 2], c: f64| [y[0] + c * k[0], y[1] + c * k[1]];
    for _ in 0..steps {
        let k1 = f(&y);
        let k2 = f(&add(&y, &k1, h / 2.0));
        let k3 = f(&add(&y, &k2, h / 2.0));
        let k4 = f(&add(&y, &k3, h));
        y = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
    }
    y
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    /// Adaptive DOPRI5 against fine fixed-step RK4 over the same time span.
    #[test]
    fn dopri5_agrees_with_rk4(
        m in -3.0f64..3.0, n in -3.0f64..3.0, k in 0.0f64..4.0,
        x0 in -0.5f64..0.5, y0 in -0.5f64..0.5,
    ) {
        let fs = tn_system(&ParamPoint::from_f64(m, n, k)).float();
        let f = |y: &[f64; 2]| {
            let (u, v) = fs.eval(y[0], y[1]);
            [u, v]
        };
        let settings = Settings { rtol: 1e-11, atol: 1e-13, ..Settings::default() };
        let run = dopri5(f, [x0, y0], &settings, |_| {}, |t, _, y| {
            if t >= 0.5 || y[0].abs() + y[1].abs() > 10.0 { Control::Stop } else { Control::Continue }
        });
        prop_assume!(run.y[0].abs() + run.y[1].abs() <= 10.0);
        let want = rk4(f, [x0, y0], run.t, 20_000);
        prop_assert!((run.y[0] - want[0]).abs() < 1e-8 && (run.y[1] - want[1]).abs() < 1e-8,
            "{:?} vs {want:?}", run.y);
    }
}

#[test]
fn dopri5_rotation_exact() {
    let run = dopri5(|y: &[f64; 2]| [-y[1], y[0]], [1.0, 0.0], &Settings::default(), |_| {}, |t, _, _| {
        if t >= 10.0 { Control::Stop } else { Control::Continue }
    });
    assert!((run.y[0] - run.t.cos()).abs() < 1e-9 && (run.y[1] - run.t.sin()).abs() < 1e-9);
}

/// Sphere projection keeps the compactified orbit on the unit sphere and in
/// step with the planar orbit.
#[test]
fn sphere_orbit_projects_to_plane_orbit() {
    let fs = tn_system(&v1()).float();
    let settings = Settings { rtol: 1e-12, atol: 1e-14, ..Settings::default() };
    let s0 = to_sphere(0.3, -0.2);
    let mut last = s0;
    dopri5(|y: &[f64; 3]| fs.sphere(*y), s0, &settings, |_| {}, |_, _, y| {
        last = *y;
        if y[2] < 0.3 { Control::Stop } else { Control::Continue }
    });
    let norm = last.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((norm - 1.0).abs() < 1e-9);
    // The planar field at the end point is tangent to the projected orbit.
    let (x, y) = to_plane(&last);
    let (u, v) = fs.eval(x, y);
    let d = fs.sphere(last);
    let (dx, dy) = (d[0] / last[2] - last[0] * d[2] / (last[2] * last[2]), d[1] / last[2] - last[1] * d[2] / (last[2] * last[2]));
    let cross = (u * dy - v * dx) / (u.hypot(v) * dx.hypot(dy));
    assert!(cross.abs() < 1e-9 && u * dx + v * dy > 0.0);
}

fn to_xy(p: &[f64; 2]) -> Option<(f64, f64)> {
    let z2 = 1.0 - p[0] * p[0] - p[1] * p[1];
    (z2 > 0.09).then(|| {
        let z = z2.sqrt();
        (p[0] / z, p[1] / z)
    })
}

/// Along every separatrix the field points forward for unstable branches
/// and backward for stable ones.
fn check_directions(sk: &Skeleton, fs: &FloatSystem) {
    for s in &sk.separatrices {
        let pts: Vec<(f64, f64)> = s.path.iter().filter_map(to_xy).collect();
        let mut votes = 0i32;
        for w in pts.windows(2) {
            let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            if dx.hypot(dy) < 1e-6 {
                continue;
            }
            let (u, v) = fs.eval(w[0].0, w[0].1);
            votes += if u * dx + v * dy > 0.0 { 1 } else { -1 };
        }
        if votes != 0 {
            assert_eq!(votes > 0, s.unstable, "separatrix from {} disagrees", s.source);
        }
    }
}

#[test]
fn time_reversal_is_an_involution() {
    for p in [v6(), v1(), at((-29, 2), (-105, 4), 7)] {
        let sk = skeleton(&p).unwrap();
        let r = sk.reversed();
        assert_eq!(serde_json::to_string(&r.reversed()).unwrap(), serde_json::to_string(&sk).unwrap());
        assert_eq!(invariants(&r).unwrap(), invariants(&sk).unwrap());
        let fs = tn_system(&p).float();
        check_directions(&sk, &fs);
        // The reversed skeleton describes −X.
        let neg = FloatSystem { p: fs.p.map(|v| -v), q: fs.q.map(|v| -v) };
        check_directions(&r, &neg);
    }
}

#[test]
fn cycles_surround_their_focus() {
    for p in [v6(), at((-49, 2), (-185, 4), 12), at((-53594, 10000), (-153612, 10000), 7)] {
        let sk = skeleton(&p).unwrap();
        assert!(!sk.limit_cycles.is_empty());
        let fs = tn_system(&p).float();
        for c in &sk.limit_cycles {
            let Place::Finite { x, y } = sk.points[c.focus].place else { panic!("focus at infinity") };
            assert!(c.inner_distance > 0.0 && c.inner_distance <= c.radius);
            let mut turned = 0.0;
            let mut prev = (c.point[1] - y).atan2(c.point[0] - x);
            let settings = Settings { max_steps: 50_000, ..Settings::default() };
            dopri5(|s: &[f64; 2]| { let (u, v) = fs.eval(s[0], s[1]); [u, v] }, c.point, &settings, |_| {}, |_, _, s| {
                let a = (s[1] - y).atan2(s[0] - x);
                let d = (a - prev + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
                turned += d;
                prev = a;
                assert!((s[0] - x).hypot(s[1] - y) > 0.5 * c.inner_distance);
                if turned.abs() >= std::f64::consts::TAU { Control::Stop } else { Control::Continue }
            });
            assert!(turned.abs() >= std::f64::consts::TAU);
        }
    }
}

#[test]
fn linear_focus_has_no_fixed_point() {
    // ẋ = x/10 − y, ẏ = x + y/10: r ↦ r·e^(2π/10).
    let fs = FloatSystem { p: [0.0, 0.1, -1.0, 0.0, 0.0, 0.0], q: [0.0, 1.0, 0.1, 0.0, 0.0, 0.0] };
    let rm = return_map(&fs, [0.0, 0.0], [1.0, 0.0], 1e-3, 1.0, 12, &Settings::default());
    assert!(rm.fixed_points.is_empty());
    assert_eq!(rm.sign_changes(), 0);
    let growth = (std::f64::consts::TAU * 0.1).exp();
    for s in &rm.samples {
        let img = s.image.unwrap();
        assert!((img / s.r - growth).abs() < 1e-6, "{img} / {}", s.r);
    }
}

#[test]
fn graphics_enclose_unit_index() {
    // On the connection at k = 7 and on the infinite-collision surface.
    let on = [ParamPoint::from_f64(-6.006410023099557, -16.43546170729995, 7.0), at((-29, 2), (-105, 4), 7)];
    for p in on {
        let g = detect_graphics(&skeleton(&p).unwrap(), 1e-3).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].enclosed_index, 1);
    }
    assert!(detect_graphics(&skeleton(&v1()).unwrap(), 1e-3).unwrap().is_empty());
}

#[test]
fn connection_point_reads_as_its_part() {
    let sk = skeleton(&ParamPoint::from_f64(-6.006410023099557, -16.43546170729995, 7.0)).unwrap();
    let t = invariants_with(&sk, 1e-3).unwrap();
    assert_eq!(t.i4, "011111");
    assert_eq!(label(&t).unwrap().name, "7S1");
}

#[test]
fn degenerate_contact_point_is_reported() {
    // μ = T4 = 0 at k = 3: the infinite point is nilpotent.
    let sk = skeleton(&ParamPoint::rational(rat(-13, 6), rat(-17, 4), int(3))).unwrap();
    assert!(sk.diagnostics.iter().any(|d| d.contains("degenerate")));
}
