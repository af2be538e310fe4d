//! Quadratic planar systems and the triple-node family
//! `ẋ = 2xy + ky²`, `ẏ = y − x² + 2mxy + ny²`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{AlgNum, BiPoly, Rat};
use crate::error::{Error, Result};

/// Monomial exponents in coefficient order `1, x, y, x², xy, y²`.
pub const MONOMIALS: [(u32, u32); 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

#[derive(Clone, Debug, PartialEq)]
pub struct ParamPoint {
    pub m: AlgNum,
    pub n: AlgNum,
    pub k: AlgNum,
}

impl ParamPoint {
    pub fn new(m: AlgNum, n: AlgNum, k: AlgNum) -> Result<Self> {
        if !(AlgNum::compatible(&m, &n) && AlgNum::compatible(&m, &k) && AlgNum::compatible(&n, &k)) {
            return Err(Error::Unsupported(
                "parameters must lie in a common number field".into(),
            ));
        }
        Ok(ParamPoint { m, n, k })
    }

    pub fn rational(m: Rat, n: Rat, k: Rat) -> Self {
        ParamPoint {
            m: m.into(),
            n: n.into(),
            k: k.into(),
        }
    }

    pub fn from_f64(m: f64, n: f64, k: f64) -> Self {
        let r = |v: f64| crate::algebra::rat::from_f64(v).expect("finite parameter");
        Self::rational(r(m), r(n), r(k))
    }

    pub fn is_rational(&self) -> bool {
        self.m.is_rational() && self.n.is_rational() && self.k.is_rational()
    }

    pub fn approx(&self) -> [f64; 3] {
        [self.m.to_f64(), self.n.to_f64(), self.k.to_f64()]
    }

    /// Rational parameters within `1e-15` relative precision of this point.
    pub fn rationalized(&self) -> Self {
        if self.is_rational() {
            return self.clone();
        }
        let [m, n, k] = self.approx();
        Self::from_f64(m, n, k)
    }

    /// The conjugate point `(−m, n, −k)`; `x ↦ −x` maps one system onto the other.
    pub fn mirror(&self) -> Self {
        ParamPoint {
            m: -&self.m,
            n: self.n.clone(),
            k: -&self.k,
        }
    }
}

impl Serialize for ParamPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ParamPoint", 4)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("approx", &self.approx())?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadSystem {
    p: [AlgNum; 6],
    q: [AlgNum; 6],
}

impl QuadSystem {
    pub fn new(p: [AlgNum; 6], q: [AlgNum; 6]) -> Result<Self> {
        if p[3..].iter().chain(&q[3..]).all(AlgNum::is_zero) {
            return Err(Error::Degenerate("quadratic parts are both zero".into()));
        }
        let first = p.iter().chain(&q).find(|c| !c.is_rational());
        if let Some(f) = first {
            if !p.iter().chain(&q).all(|c| AlgNum::compatible(c, f)) {
                return Err(Error::Unsupported(
                    "coefficients must lie in a common number field".into(),
                ));
            }
        }
        Ok(QuadSystem { p, q })
    }

    pub fn from_ints(p: [i64; 6], q: [i64; 6]) -> Result<Self> {
        Self::new(p.map(AlgNum::from_int), q.map(AlgNum::from_int))
    }

    pub fn p(&self) -> &[AlgNum; 6] {
        &self.p
    }

    pub fn q(&self) -> &[AlgNum; 6] {
        &self.q
    }

    pub fn is_rational(&self) -> bool {
        self.p.iter().chain(&self.q).all(AlgNum::is_rational)
    }

    pub fn p_poly(&self) -> BiPoly {
        to_bipoly(&self.p)
    }

    pub fn q_poly(&self) -> BiPoly {
        to_bipoly(&self.q)
    }

    /// If the system has the triple-node normal form, its parameters.
    pub fn tn_params(&self) -> Option<ParamPoint> {
        let z = |c: &AlgNum| c.is_zero();
        let is = |c: &AlgNum, v: i64| *c == AlgNum::from_int(v);
        let shape = z(&self.p[0])
            && z(&self.p[1])
            && z(&self.p[2])
            && z(&self.p[3])
            && is(&self.p[4], 2)
            && z(&self.q[0])
            && z(&self.q[1])
            && is(&self.q[2], 1)
            && is(&self.q[3], -1);
        shape.then(|| ParamPoint {
            m: &self.q[4] * &AlgNum::from_rat(crate::algebra::rat::rat(1, 2)),
            n: self.q[5].clone(),
            k: self.p[5].clone(),
        })
    }

    pub fn eval_exact(&self, x: &AlgNum, y: &AlgNum) -> (AlgNum, AlgNum) {
        (self.p_poly().eval(x, y), self.q_poly().eval(x, y))
    }

    pub fn jacobian_exact(&self, x: &AlgNum, y: &AlgNum) -> [[AlgNum; 2]; 2] {
        let (p, q) = (self.p_poly(), self.q_poly());
        [
            [p.dx().eval(x, y), p.dy().eval(x, y)],
            [q.dx().eval(x, y), q.dy().eval(x, y)],
        ]
    }

    pub fn float(&self) -> FloatSystem {
        FloatSystem {
            p: self.p.clone().map(|c| c.to_f64()),
            q: self.q.clone().map(|c| c.to_f64()),
        }
    }

    pub fn field_eval(&self, x: f64, y: f64) -> (f64, f64) {
        self.float().eval(x, y)
    }

    pub fn jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        self.float().jacobian(x, y)
    }
}

fn to_bipoly(c: &[AlgNum; 6]) -> BiPoly {
    BiPoly::from_terms(MONOMIALS.iter().zip(c).map(|(&(i, j), c)| (i, j, c.clone())))
}

pub fn tn_system(p: &ParamPoint) -> QuadSystem {
    let z = || AlgNum::from_int(0);
    let two = AlgNum::from_int(2);
    QuadSystem {
        p: [z(), z(), z(), z(), two.clone(), p.k.clone()],
        q: [
            z(),
            z(),
            AlgNum::from_int(1),
            AlgNum::from_int(-1),
            &two * &p.m,
            p.n.clone(),
        ],
    }
}

/// Float view of a quadratic system for integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatSystem {
    pub p: [f64; 6],
    pub q: [f64; 6],
}

fn eval6(c: &[f64; 6], x: f64, y: f64) -> f64 {
    c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y
}

/// Homogenized evaluation `Σ c·x^i y^j z^(2−i−j)`.
fn hom6(c: &[f64; 6], x: f64, y: f64, z: f64) -> f64 {
    c[0] * z * z + (c[1] * x + c[2] * y) * z + c[3] * x * x + c[4] * x * y + c[5] * y * y
}

impl FloatSystem {
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        (eval6(&self.p, x, y), eval6(&self.q, x, y))
    }

    pub fn jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let d = |c: &[f64; 6]| {
            [
                c[1] + 2.0 * c[3] * x + c[4] * y,
                c[2] + c[4] * x + 2.0 * c[5] * y,
            ]
        };
        [d(&self.p), d(&self.q)]
    }

    pub fn hom(&self, x: f64, y: f64, z: f64) -> (f64, f64) {
        (hom6(&self.p, x, y, z), hom6(&self.q, x, y, z))
    }

    /// Vector field on the upper Poincaré hemisphere `X² + Y² + Z² = 1`,
    /// `Z ≥ 0`, obtained by central projection and multiplication by `Z`
    /// (so the equator is invariant and orbits keep their direction for `Z > 0`).
    pub fn sphere(&self, s: [f64; 3]) -> [f64; 3] {
        let [x, y, z] = s;
        let (p, q) = self.hom(x, y, z);
        let radial = x * p + y * q;
        [p - x * radial, q - y * radial, -z * radial]
    }
}

impl Serialize for QuadSystem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("QuadSystem", 2)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("q", &self.q)?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Text(String),
    Int(i64),
    Float(f64),
}

impl CoeffRepr {
    fn value(self) -> std::result::Result<AlgNum, String> {
        match self {
            CoeffRepr::Text(t) => AlgNum::parse(&t).map(|(v, _)| v).map_err(|e| e.to_string()),
            CoeffRepr::Int(i) => Ok(AlgNum::from_int(i)),
            CoeffRepr::Float(f) => crate::algebra::rat::from_f64(f)
                .map(AlgNum::from_rat)
                .ok_or_else(|| format!("non-finite coefficient {f}")),
        }
    }
}

impl<'de> Deserialize<'de> for QuadSystem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            p: Vec<CoeffRepr>,
            q: Vec<CoeffRepr>,
        }
        let raw = Raw::deserialize(d)?;
        let conv = |v: Vec<CoeffRepr>| -> std::result::Result<[AlgNum; 6], D::Error> {
            if v.len() != 6 {
                return Err(D::Error::custom(format!("expected 6 coefficients, found {}", v.len())));
            }
            let vals = v
                .into_iter()
                .map(CoeffRepr::value)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(D::Error::custom)?;
            Ok(vals.try_into().expect("length checked"))
        };
        QuadSystem::new(conv(raw.p)?, conv(raw.q)?).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{int, rat};

    fn pt(m: Rat, n: Rat, k: Rat) -> ParamPoint {
        ParamPoint::rational(m, n, k)
    }

    #[test]
    fn normal_form_coefficients() {
        let s = tn_system(&pt(rat(-29, 2), rat(-105, 4), int(7)));
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"p":["0","0","0","0","2","7"],"q":["0","0","1","-1","-29","-105/4"]}"#
        );
        let back: QuadSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.tn_params().unwrap(), pt(rat(-29, 2), rat(-105, 4), int(7)));
    }

    #[test]
    fn field_values() {
        let s = tn_system(&pt(int(0), int(0), int(0)));
        assert_eq!(s.field_eval(1.0, 1.0), (2.0, 0.0));
        assert_eq!(s.field_eval(0.0, 0.0), (0.0, 0.0));
        let s = tn_system(&pt(int(0), int(-1), int(0)));
        assert_eq!(s.field_eval(0.0, 1.0), (0.0, 0.0));
        // ∂ẏ/∂y = 1 + 2mx + 2ny = −1 here; det = −2 < 0.
        assert_eq!(s.jacobian(0.0, 1.0), [[2.0, 0.0], [0.0, -1.0]]);
    }

    #[test]
    fn origin_jacobian() {
        let s = tn_system(&pt(rat(3, 7), int(-2), int(5)));
        let z = AlgNum::from_int(0);
        let j = s.jacobian_exact(&z, &z);
        let expect = [[0, 0], [0, 1]].map(|r| r.map(AlgNum::from_int));
        assert_eq!(j, expect);
        let x2 = QuadSystem::from_ints([0, 0, 0, 1, 0, 0], [0, 0, 1, 0, 0, 0]).unwrap();
        assert_eq!(x2.jacobian(0.0, 0.0), [[0.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn rejects_linear_systems() {
        assert!(QuadSystem::from_ints([0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]).is_err());
    }

    #[test]
    fn accepts_numeric_json() {
        let s: QuadSystem =
            serde_json::from_str(r#"{"p":[0,0,0,1,0,0],"q":[0,0,1,0,0,0.5]}"#).unwrap();
        assert_eq!(s.q()[5], AlgNum::from_rat(rat(1, 2)));
    }

    #[test]
    fn sphere_field_keeps_equator_invariant() {
        let s = tn_system(&pt(int(1), int(2), int(3))).float();
        let v = s.sphere([0.6, 0.8, 0.0]);
        assert_eq!(v[2], 0.0);
        let w = s.sphere([0.3, -0.4, (1.0f64 - 0.25).sqrt()]);
        let dot = 0.3 * w[0] - 0.4 * w[1] + 0.75f64.sqrt() * w[2];
        assert!(dot.abs() < 1e-14);
    }
}
