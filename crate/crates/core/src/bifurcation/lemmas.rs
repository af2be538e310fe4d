//! Exact checks of the geometric facts about the surfaces: singular loci,
//! pairwise intersections and contacts, and the special slice `k = 2√2`.

use std::time::Instant;

use serde::Serialize;

use crate::algebra::rat::{int, rat};
use crate::algebra::{AlgNum, MultiPoly, Rat};

use super::{SurfaceId, K, M, N};

/// Auxiliary variable (a cube root of `k`, or a square root) in the
/// four-variable ring `(m, n, k, s)`.
const S: usize = 3;
const NV: usize = 4;

#[derive(Clone, Debug, Serialize)]
pub struct LemmaCheck {
    pub lemma: String,
    pub statement: String,
    pub passed: bool,
    /// Residual polynomial or value when the check fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub checks: Vec<LemmaCheck>,
    pub elapsed_ms: u128,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn lemma_passed(&self, lemma: &str) -> bool {
        let mut it = self.checks.iter().filter(|c| c.lemma == lemma).peekable();
        it.peek().is_some() && it.all(|c| c.passed)
    }
}

fn v(i: usize) -> MultiPoly {
    MultiPoly::var(NV, i)
}

fn c(r: Rat) -> MultiPoly {
    MultiPoly::constant(NV, r)
}

fn ci(i: i64) -> MultiPoly {
    c(int(i))
}

fn surf(id: SurfaceId) -> MultiPoly {
    id.polynomial().extend(NV)
}

fn gamma1() -> MultiPoly {
    // −64 + 32m² + 16n − n²
    &(&(&ci(-64) + &v(M).pow(2).scale(&int(32))) + &v(N).scale(&int(16))) - &v(N).pow(2)
}

fn gamma2() -> MultiPoly {
    // 1 + 2m² + 2n + m²n + n²
    let m2 = v(M).pow(2);
    let terms = [
        ci(1),
        m2.scale(&int(2)),
        v(N).scale(&int(2)),
        &m2 * &v(N),
        v(N).pow(2),
    ];
    terms.iter().fold(MultiPoly::zero(NV), |acc, t| &acc + t)
}

/// `k² + 2km + 4`, the factor vanishing at `m = −(4 + k²)/2k`.
fn contact_factor() -> MultiPoly {
    &(&v(K).pow(2) + &(&v(K) * &v(M)).scale(&int(2))) + &ci(4)
}

/// Substitutes the point `r(k) = (−(4 + k²)/2k, −2 − k²/4, k)`, clearing denominators.
fn at_r(p: &MultiPoly) -> MultiPoly {
    let m_num = -&(&ci(4) + &v(K).pow(2));
    let m_den = v(K).scale(&int(2));
    let n_num = -&(&ci(8) + &v(K).pow(2));
    let n_den = ci(4);
    p.substitute_fraction(M, &m_num, &m_den)
        .substitute_fraction(N, &n_num, &n_den)
}

/// Substitutes `n = (k² + 4km)/4`, i.e. restricts to the plane `μ = 0`.
fn on_mu_plane(p: &MultiPoly) -> MultiPoly {
    let num = &v(K).pow(2) + &(&v(K) * &v(M)).scale(&int(4));
    p.substitute_fraction(N, &num, &ci(4))
}

struct Suite {
    checks: Vec<LemmaCheck>,
}

impl Suite {
    fn zero(&mut self, lemma: &str, statement: &str, residual: MultiPoly) {
        let passed = residual.is_zero();
        self.push(lemma, statement, passed, (!passed).then(|| residual.to_string()));
    }

    fn holds(&mut self, lemma: &str, statement: &str, ok: bool, witness: impl FnOnce() -> String) {
        self.push(lemma, statement, ok, (!ok).then(witness));
    }

    fn push(&mut self, lemma: &str, statement: &str, passed: bool, residual: Option<String>) {
        self.checks.push(LemmaCheck {
            lemma: lemma.to_string(),
            statement: statement.to_string(),
            passed,
            residual,
        });
    }
}

/// `p / d` must be a nonzero rational constant.
fn constant_multiple(p: &MultiPoly, d: &MultiPoly) -> Option<Rat> {
    let q = p.exact_div(d)?;
    if q.total_degree() == Some(0) {
        Some(q.coeff(&[0; NV]))
    } else {
        None
    }
}

fn specialize_k0(p: &MultiPoly) -> MultiPoly {
    p.specialize(K, &int(0))
}

pub fn verify_lemmas() -> LemmaReport {
    let start = Instant::now();
    let mut s = Suite { checks: Vec::new() };
    let mu = surf(SurfaceId::S1);
    let t4 = surf(SurfaceId::S3);
    let eta = surf(SurfaceId::S5);
    let w4 = surf(SurfaceId::S6);

    // L1(i): a gradient component is a nonzero constant.
    for (name, p) in [("mu", &mu), ("T4", &t4)] {
        let grad = p.gradient();
        let ok = grad[..3].iter().any(|g| g.total_degree() == Some(0));
        s.holds("L1", &format!("grad {name} never vanishes"), ok, || {
            grad.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")
        });
    }

    // L1(ii): η and ∇η vanish along r(t) = (−3t/2, 2 − 3t², t³), which lies on 4m² + 3n − 6 = 0.
    let t = v(S);
    let rm = t.scale(&rat(-3, 2));
    let rn = &ci(2) - &t.pow(2).scale(&int(3));
    let rk = t.pow(3);
    let along = |p: &MultiPoly| p.substitute(M, &rm).substitute(N, &rn).substitute(K, &rk);
    s.zero("L1", "eta vanishes on the singular curve", along(&eta));
    for (i, g) in eta.gradient()[..3].iter().enumerate() {
        s.zero("L1", &format!("d eta/d{} vanishes on the singular curve", ["m", "n", "k"][i]), along(g));
    }
    let quadric = &(&v(M).pow(2).scale(&int(4)) + &v(N).scale(&int(3))) - &ci(6);
    s.zero("L1", "singular curve lies on 4m^2 + 3n - 6 = 0", along(&quadric));

    // L1(iii): ∇W4 = 0 at (0, 2, 0); W4|k=0 = 16(n − 2)² divides η|k=0.
    let origin_pt = [int(0), int(2), int(0), int(0)];
    for (i, g) in w4.gradient()[..3].iter().enumerate() {
        let val = g.eval(&origin_pt).expect("arity");
        s.holds("L1", &format!("d W4/d{} = 0 at (0,2,0)", ["m", "n", "k"][i]), val == int(0), || {
            crate::algebra::rat::to_string(&val)
        });
    }
    let line = (&v(N) - &ci(2)).pow(2);
    let w4k0 = specialize_k0(&w4);
    s.zero("L1", "W4|k=0 = 16(n-2)^2", &w4k0 - &line.scale(&int(16)));
    let etak0 = specialize_k0(&eta);
    s.holds("L1", "W4|k=0 divides eta|k=0", etak0.exact_div(&w4k0).is_some(), || etak0.to_string());

    // L2: μ = T4 = 0 at r(k); no intersection at k = 0.
    s.zero("L2", "mu(r(k)) = 0", at_r(&mu));
    s.zero("L2", "T4(r(k)) = 0", at_r(&t4));
    let res = MultiPoly::resultant(&specialize_k0(&mu), &specialize_k0(&t4), N).expect("n occurs");
    s.holds("L2", "mu and T4 disjoint at k = 0", res.total_degree() == Some(0), || res.to_string());

    // L3: Res_k(μ, η) = −16 γ1 γ2²; intersection curves; k = 0 points (±√2, 0, 0).
    let res = MultiPoly::resultant(&mu, &eta, K).expect("k occurs");
    let expected = (&gamma1() * &gamma2().pow(2)).scale(&int(-16));
    s.zero("L3", "Res_k(mu, eta) = -16 gamma1 gamma2^2", &res - &expected);
    let sqrt2 = &v(S).pow(2) - &ci(2);
    let reduce2 = |p: &MultiPoly| p.reduce_monic(S, &sqrt2).expect("monic relation");
    for (name, sign) in [("r1", -1), ("r2", 1)] {
        let sm = v(S).scale(&int(sign));
        let pm = &sm - &v(K).scale(&rat(1, 4));
        let pn = &sm * &v(K);
        let sub = |p: &MultiPoly| reduce2(&p.substitute(M, &pm).substitute(N, &pn));
        s.zero("L3", &format!("mu({name}) = 0"), sub(&mu));
        s.zero("L3", &format!("eta({name}) = 0"), sub(&eta));
        s.zero("L3", &format!("gamma1({name}) = 0"), sub(&gamma1()));
    }
    s.zero("L3", "eta(r3) = 0", at_r(&eta));
    s.zero("L3", "gamma2(r3) = 0", at_r(&gamma2()));
    for sign in [-1, 1] {
        let p = reduce2(&specialize_k0(&eta).substitute(M, &v(S).scale(&int(sign))).specialize(N, &int(0)));
        s.zero("L3", &format!("eta({}sqrt2, 0, 0) = 0", if sign < 0 { "-" } else { "" }), p);
    }
    s.zero("L3", "mu|k=0 = -4n", &specialize_k0(&mu) + &v(N).scale(&int(4)));

    // L4: S1 and S6 are disjoint at k = 0 and touch to second order along γ2.
    let w4_on_n0 = specialize_k0(&w4).specialize(N, &int(0));
    s.zero("L4", "W4 = 64 on mu = 0 at k = 0", &w4_on_n0 - &ci(64));
    s.zero("L4", "W4(r(k)) = 0", at_r(&w4));
    s.zero("L4", "r(k) lies on gamma2", at_r(&gamma2()));
    let restricted = on_mu_plane(&w4);
    let mult = constant_multiple(&restricted, &contact_factor().pow(2));
    s.holds("L4", "W4 on mu = 0 is a constant times (k^2+2km+4)^2", mult.is_some(), || {
        restricted.to_string()
    });

    // L5: T4 ∩ η.
    let n_hopf_num = -&(&ci(8) + &v(K).pow(2));
    let eta_hopf = eta.substitute_fraction(N, &n_hopf_num, &ci(4));
    let quartic = {
        // k⁴ − 2k³m + 44k² + 64km − 256m² + 1024
        let k = v(K);
        let m = v(M);
        let terms = [
            k.pow(4),
            (&k.pow(3) * &m).scale(&int(-2)),
            k.pow(2).scale(&int(44)),
            (&k * &m).scale(&int(64)),
            m.pow(2).scale(&int(-256)),
            ci(1024),
        ];
        terms.iter().fold(MultiPoly::zero(NV), |acc, t| &acc + t)
    };
    let mult = constant_multiple(&eta_hopf, &(&contact_factor() * &quartic));
    s.holds("L5", "eta on T4 = 0 factors as (k^2+2km+4)(quartic)", mult.is_some(), || {
        eta_hopf.to_string()
    });
    let radicand = (&ci(64) + &v(K).pow(2)).pow(3);
    let relation = &v(S).pow(2) - &radicand;
    for (name, sign) in [("r1", -1), ("r3", 1)] {
        let num = &(&v(K).scale(&int(32)) - &v(K).pow(3)) + &v(S).scale(&int(sign));
        let r = quartic
            .substitute_fraction(M, &num, &ci(256))
            .reduce_monic(S, &relation)
            .expect("monic relation");
        s.zero("L5", &format!("{name} with radicand (64+k^2)^3 solves T4 = eta = 0"), r);
    }
    let printed = &v(S).pow(2) - &(&ci(64) - &v(K).pow(2)).pow(3);
    let num = &(&v(K).scale(&int(32)) - &v(K).pow(3)) - &v(S);
    let r = quartic
        .substitute_fraction(M, &num, &ci(256))
        .reduce_monic(S, &printed)
        .expect("monic relation");
    s.holds(
        "L5",
        "radicand (64-k^2)^3 does not solve T4 = eta = 0",
        !r.is_zero(),
        || "residual vanished".to_string(),
    );
    for m in [-2, 2] {
        let val = eta
            .eval(&[int(m), int(-2), int(0), int(0)])
            .expect("arity");
        s.holds("L5", &format!("eta({m}, -2, 0) = 0"), val == int(0), || {
            crate::algebra::rat::to_string(&val)
        });
    }

    // Corollary: at k = 2√2, r1 = r2 = (−3√2/2, −4, 2√2), a singular point of η.
    corollary(&mut s, &eta);

    // L6: η ∩ W4.
    let eta_k0 = (&line * &(&(&v(M).pow(2) + &v(N)) - &ci(2))).scale(&int(4));
    s.zero("L6", "eta|k=0 = 4(n-2)^2(m^2+n-2)", &specialize_k0(&eta) - &eta_k0);
    s.zero("L6", "eta(r(k)) = 0", at_r(&eta));
    s.zero("L6", "W4(r(k)) = 0", at_r(&w4));
    let eta_plane = on_mu_plane(&eta);
    s.holds(
        "L6",
        "eta on mu = 0 has a double zero at r(k)",
        eta_plane.exact_div(&contact_factor().pow(2)).is_some(),
        || eta_plane.to_string(),
    );

    // L7: (μ W4)(r(t)) = t⁴ (t² − 2)⁶ (t² + 6).
    let g = along(&(&mu * &w4));
    let t2 = v(S).pow(2);
    let expected = &(&v(S).pow(4) * &(&t2 - &ci(2)).pow(6)) * &(&t2 + &ci(6));
    s.zero("L7", "(mu W4)(r(t)) = t^4 (t^2-2)^6 (t^2+6)", &g - &expected);

    // Resultant form of S1: Res_x(p2, q2) = y⁴ μ.
    s1_resultant(&mut s);

    LemmaReport {
        checks: s.checks,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

fn corollary(s: &mut Suite, eta: &MultiPoly) {
    let k = AlgNum::sqrt(&int(8)).expect("positive");
    let k2 = &k * &k;
    let k3 = &k2 * &k;
    let root = AlgNum::sqrt(&(int(72) * int(72) * int(72))).expect("positive");
    let r1_m = &(&(&k * &AlgNum::from_int(32)) - &k3) - &root;
    let r1_m = &r1_m * &AlgNum::from_rat(rat(1, 256));
    let r2_m = (&(&AlgNum::from_int(4) + &k2) * &AlgNum::from_int(-1))
        .div(&(&k * &AlgNum::from_int(2)))
        .expect("k nonzero");
    let n = &AlgNum::from_int(-2) - &(&k2 * &AlgNum::from_rat(rat(1, 4)));
    let target_m = &AlgNum::sqrt(&int(2)).expect("positive") * &AlgNum::from_rat(rat(-3, 2));
    s.holds("C1", "r1 = r2 at k = 2sqrt2", r1_m == r2_m, || format!("{r1_m} vs {r2_m}"));
    s.holds(
        "C1",
        "r1 = (-3sqrt2/2, -4, 2sqrt2)",
        r1_m == target_m && n == AlgNum::from_int(-4),
        || format!("({r1_m}, {n})"),
    );
    let pt = [r1_m.clone(), n.clone(), k.clone(), AlgNum::from_int(0)];
    let lift = |c: &Rat| AlgNum::from_rat(c.clone());
    let val = eta.eval_with(&pt, lift).expect("arity");
    s.holds("C1", "eta = 0 at the contact point", val.is_zero(), || val.to_string());
    for (i, g) in eta.gradient()[..3].iter().enumerate() {
        let val = g.eval_with(&pt, lift).expect("arity");
        s.holds(
            "C1",
            &format!("d eta/d{} = 0 at the contact point", ["m", "n", "k"][i]),
            val.is_zero(),
            || val.to_string(),
        );
    }
}

fn s1_resultant(s: &mut Suite) {
    // Ring (m, n, k, x, y).
    let var = |i| MultiPoly::var(5, i);
    let (x, y) = (var(3), var(4));
    let p2 = &(&x * &y).scale(&int(2)) + &(&var(K) * &y.pow(2));
    let q2 = &(&-&x.pow(2) + &(&(&var(M) * &x) * &y).scale(&int(2))) + &(&var(N) * &y.pow(2));
    let res = MultiPoly::resultant(&p2, &q2, 3).expect("x occurs");
    let mu = SurfaceId::S1.polynomial().extend(5);
    s.zero("S1", "Res_x(p2, q2) = y^4 mu", &res - &(&y.pow(4) * &mu));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_lemma_passes() {
        let report = verify_lemmas();
        for c in &report.checks {
            assert!(c.passed, "{} {}: {:?}", c.lemma, c.statement, c.residual);
        }
        for l in ["L1", "L2", "L3", "L4", "L5", "C1", "L6", "L7", "S1"] {
            assert!(report.lemma_passed(l), "{l}");
        }
    }

    #[test]
    fn third_intersection_at_k_one() {
        let p = [rat(-5, 2), rat(-9, 4), int(1)];
        for id in [SurfaceId::S1, SurfaceId::S5, SurfaceId::S3] {
            assert_eq!(id.polynomial().eval(&p).unwrap(), int(0), "{id}");
        }
    }

    #[test]
    fn resultant_identity_detects_perturbation() {
        let mu = surf(SurfaceId::S1);
        let eta = &surf(SurfaceId::S5) + &ci(1);
        let res = MultiPoly::resultant(&mu, &eta, K).unwrap();
        let expected = (&gamma1() * &gamma2().pow(2)).scale(&int(-16));
        assert!(!(&res - &expected).is_zero());
    }
}
