use proptest::prelude::*;
use trinode::algebra::rat::rat;
use trinode::algebra::{AlgNum, Rat};
use trinode::qsystem::{tn_system, ParamPoint};
use trinode::singular::finite_singularities;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=4).prop_map(|(p, q)| rat(p, q))
}

fn point() -> impl Strategy<Value = ParamPoint> {
    (small_rat(), small_rat(), 0i64..=24).prop_map(|(m, n, k)| ParamPoint::rational(m, n, rat(k, 2)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    /// `x ↦ −x` conjugates `(m, n, k)` with `(−m, n, −k)` exactly.
    #[test]
    fn mirror_conjugacy(p in point(), x in small_rat(), y in small_rat()) {
        let s = tn_system(&p);
        let t = tn_system(&p.mirror());
        let (x, y) = (AlgNum::from_rat(x), AlgNum::from_rat(y));
        let (p0, q0) = s.eval_exact(&x, &y);
        let (p1, q1) = t.eval_exact(&-&x, &y);
        prop_assert_eq!(p1, -&p0);
        prop_assert_eq!(q1, q0);
    }

    /// The contact function of a quadratic field with a non-invariant line is
    /// a quadratic along it: at most two sign changes.
    #[test]
    fn lines_have_at_most_two_contacts(
        p in point(),
        x0 in -5.0f64..5.0, y0 in -5.0f64..5.0, theta in 0.0f64..std::f64::consts::PI,
    ) {
        let fs = tn_system(&p).float();
        let (dx, dy) = (theta.cos(), theta.sin());
        let contact = |s: f64| {
            let (u, v) = fs.eval(x0 + s * dx, y0 + s * dy);
            dy * u - dx * v
        };
        let vals: Vec<f64> = (0..=2000).map(|i| contact(-50.0 + 0.05 * i as f64)).collect();
        let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        prop_assume!(scale > 0.0);
        let signs: Vec<f64> = vals.iter().filter(|v| v.abs() > 1e-12 * scale).map(|v| v.signum()).collect();
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        prop_assert!(changes <= 2, "{changes} contacts");
    }

    /// Away from the escape surface there are exactly two finite points, the
    /// second at `(−2k/μ, 4/μ)`.
    #[test]
    fn second_finite_point_closed_form(p in point()) {
        let [m, n, k] = p.approx();
        let mu = k * k + 4.0 * k * m - 4.0 * n;
        prop_assume!(mu.abs() > 1e-9);
        let pts = finite_singularities(&tn_system(&p)).unwrap();
        prop_assert_eq!(pts.len(), 2);
        let other = pts.iter().find(|q| !(q.x.is_zero() && q.y.is_zero())).unwrap();
        prop_assert!((other.x.to_f64() + 2.0 * k / mu).abs() < 1e-12 * (1.0 + (2.0 * k / mu).abs()));
        prop_assert!((other.y.to_f64() - 4.0 / mu).abs() < 1e-12 * (1.0 + (4.0 / mu).abs()));
    }
}
