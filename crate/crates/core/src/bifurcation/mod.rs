//! Algebraic bifurcation surfaces of the triple-node family, their slices
//! `k = k0`, and exact verification of the surface lemmas.

mod lemmas;
mod slice;

pub use lemmas::{verify_lemmas, LemmaCheck, LemmaReport};
pub use slice::{
    slice_polynomial, trace_slice, Curve, CurveSegment, Region, RegionEdge, SliceDiagram, Window, DEFAULT_WINDOW,
};

use std::fmt;

use serde::{Serialize, Serializer};

use crate::algebra::{AlgNum, MultiPoly};
use crate::qsystem::ParamPoint;

/// Variable order of surface polynomials.
pub const M: usize = 0;
pub const N: usize = 1;
pub const K: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SurfaceId {
    S1,
    S3,
    S5,
    S6,
}

impl SurfaceId {
    pub const ALL: [SurfaceId; 4] = [SurfaceId::S1, SurfaceId::S3, SurfaceId::S5, SurfaceId::S6];

    pub fn color(self) -> &'static str {
        match self {
            SurfaceId::S1 => "blue",
            SurfaceId::S3 => "green",
            SurfaceId::S5 => "red",
            SurfaceId::S6 => "black",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            SurfaceId::S1 => "mu",
            SurfaceId::S3 => "T4",
            SurfaceId::S5 => "eta",
            SurfaceId::S6 => "W4",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// The defining polynomial in `(m, n, k)`.
    pub fn polynomial(self) -> MultiPoly {
        let terms: &[(i64, &[u32])] = match self {
            SurfaceId::S1 => &[(1, &[0, 0, 2]), (4, &[1, 0, 1]), (-4, &[0, 1, 0])],
            SurfaceId::S3 => &[(8, &[0, 0, 0]), (1, &[0, 0, 2]), (4, &[0, 1, 0])],
            SurfaceId::S5 => &[
                (-32, &[0, 0, 0]),
                (-27, &[0, 0, 2]),
                (-72, &[1, 0, 1]),
                (16, &[2, 0, 0]),
                (32, &[3, 0, 1]),
                (48, &[0, 1, 0]),
                (36, &[1, 1, 1]),
                (-16, &[2, 1, 0]),
                (-24, &[0, 2, 0]),
                (4, &[2, 2, 0]),
                (4, &[0, 3, 0]),
            ],
            SurfaceId::S6 => &[
                (64, &[0, 0, 0]),
                (48, &[0, 0, 2]),
                (1, &[0, 0, 4]),
                (128, &[1, 0, 1]),
                (-64, &[0, 1, 0]),
                (8, &[0, 1, 2]),
                (16, &[0, 2, 0]),
            ],
        };
        MultiPoly::from_terms(3, terms)
    }

    /// Fast float evaluation together with a magnitude scale for the
    /// rounding-error bound.
    pub fn eval_f64(self, m: f64, n: f64, k: f64) -> (f64, f64) {
        let k2 = k * k;
        match self {
            SurfaceId::S1 => sum_abs(&[k2, 4.0 * k * m, -4.0 * n]),
            SurfaceId::S3 => sum_abs(&[8.0, k2, 4.0 * n]),
            SurfaceId::S5 => sum_abs(&[
                -32.0,
                -27.0 * k2,
                -72.0 * k * m,
                16.0 * m * m,
                32.0 * k * m * m * m,
                48.0 * n,
                36.0 * k * m * n,
                -16.0 * m * m * n,
                -24.0 * n * n,
                4.0 * m * m * n * n,
                4.0 * n * n * n,
            ]),
            SurfaceId::S6 => sum_abs(&[
                64.0,
                48.0 * k2,
                k2 * k2,
                128.0 * k * m,
                -64.0 * n,
                8.0 * k2 * n,
                16.0 * n * n,
            ]),
        }
    }
}

fn sum_abs(t: &[f64]) -> (f64, f64) {
    (t.iter().sum(), t.iter().map(|v| v.abs()).sum())
}

impl fmt::Display for SurfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub fn surface_value(id: SurfaceId, p: &ParamPoint) -> AlgNum {
    id.polynomial()
        .eval_with(&[p.m.clone(), p.n.clone(), p.k.clone()], |c| {
            AlgNum::from_rat(c.clone())
        })
        .expect("three coordinates")
}

/// Signs of `(μ, T4, η, W4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(pub [i8; 4]);

impl SignVector {
    pub fn of(p: &ParamPoint) -> Self {
        SignVector(SurfaceId::ALL.map(|s| surface_value(s, p).sign() as i8))
    }

    /// Float signs with an exact fallback near zero.
    pub fn at(m: f64, n: f64, k: &AlgNum) -> Self {
        let kf = k.to_f64();
        SignVector(SurfaceId::ALL.map(|s| {
            let (v, scale) = s.eval_f64(m, n, kf);
            if v.abs() > 1e-9 * scale.max(1.0) {
                v.signum() as i8
            } else {
                let pt = ParamPoint {
                    m: AlgNum::from_rat(crate::algebra::rat::from_f64(m).expect("finite")),
                    n: AlgNum::from_rat(crate::algebra::rat::from_f64(n).expect("finite")),
                    k: k.clone(),
                };
                surface_value(s, &pt).sign() as i8
            }
        }))
    }

    pub fn get(&self, s: SurfaceId) -> i8 {
        self.0[s.index()]
    }

    pub fn has_zero(&self) -> bool {
        self.0.contains(&0)
    }

    /// Surfaces whose sign differs between the two vectors.
    pub fn differences(&self, other: &SignVector) -> Vec<SurfaceId> {
        SurfaceId::ALL
            .into_iter()
            .filter(|s| self.get(*s) != other.get(*s))
            .collect()
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.0 {
            let c = match v {
                1 => '+',
                -1 => '-',
                _ => '0',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl Serialize for SignVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The slices `k = 0, 1, 2√2, 3` where the surfaces change behaviour.
pub fn key_slices() -> Vec<AlgNum> {
    vec![
        AlgNum::from_int(0),
        AlgNum::from_int(1),
        AlgNum::sqrt(&crate::algebra::rat::int(8)).expect("positive radicand"),
        AlgNum::from_int(3),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{int, rat};
    use crate::algebra::Rat;

    fn pt(m: Rat, n: Rat, k: Rat) -> ParamPoint {
        ParamPoint::rational(m, n, k)
    }

    #[test]
    fn surface_value_examples() {
        assert!(surface_value(SurfaceId::S6, &pt(int(7), int(2), int(0))).is_zero());
        assert!(surface_value(SurfaceId::S3, &pt(int(2), int(-2), int(0))).is_zero());
        let s2 = AlgNum::sqrt(&int(2)).unwrap();
        let p = ParamPoint::new(s2, AlgNum::from_int(0), AlgNum::from_int(0)).unwrap();
        assert!(surface_value(SurfaceId::S5, &p).is_zero());
        assert_eq!(
            surface_value(SurfaceId::S5, &pt(int(0), int(0), int(0))),
            AlgNum::from_int(-32)
        );
    }

    #[test]
    fn float_evaluation_matches_exact() {
        for (m, n, k) in [(rat(-29, 2), rat(-105, 4), int(7)), (rat(1, 3), rat(-7, 5), rat(5, 2))] {
            let p = pt(m.clone(), n.clone(), k.clone());
            for s in SurfaceId::ALL {
                let exact = surface_value(s, &p).to_f64();
                let (v, scale) = s.eval_f64(
                    crate::algebra::rat::to_f64(&m),
                    crate::algebra::rat::to_f64(&n),
                    crate::algebra::rat::to_f64(&k),
                );
                assert!((v - exact).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn key_slices_are_ordered() {
        let ks = key_slices();
        assert_eq!(ks.len(), 4);
        assert!((ks[2].to_f64() - 2.8284271247461903).abs() < 1e-15);
        assert!(ks.windows(2).all(|w| (&w[1] - &w[0]).sign() > 0));
    }

    #[test]
    fn mirror_preserves_signs() {
        let p = pt(rat(3, 2), rat(-5, 3), int(4));
        assert_eq!(SignVector::of(&p), SignVector::of(&p.mirror()));
    }
}
