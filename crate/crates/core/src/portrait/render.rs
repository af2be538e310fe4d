//! SVG drawing of a skeleton on the Poincaré disc.

use std::fmt::Write;

use crate::qsystem::{tn_system, FloatSystem, ParamPoint};
use crate::singular::{SingularKind, Stability};

use super::integrate::{decimate, dopri5, integrate, to_sphere, Control, Settings};
use super::skeleton::{Place, Skeleton, SkeletonPoint};

const FILLER_RADII: [f64; 3] = [0.25, 0.55, 0.85];
const FILLER_ANGLES: usize = 8;

fn filler_settings() -> Settings {
    Settings {
        rtol: 1e-7,
        atol: 1e-9,
        max_steps: 4000,
        ..Settings::default()
    }
}

/// Thin orbits through a fixed grid of disc points, both time directions.
fn filler_orbits(fs: &FloatSystem) -> Vec<Vec<[f64; 2]>> {
    let mut out = Vec::new();
    for r in FILLER_RADII {
        for j in 0..FILLER_ANGLES {
            let t = std::f64::consts::TAU * (j as f64 + 0.5 * r) / FILLER_ANGLES as f64;
            let (dx, dy) = (r * t.cos(), r * t.sin());
            let z = (1.0 - dx * dx - dy * dy).sqrt();
            let start = [dx, dy, z];
            let mut line: Vec<[f64; 2]> = Vec::new();
            for dir in [-1.0, 1.0] {
                let o = integrate(fs, start, dir, &[], None, &filler_settings());
                let mut pts: Vec<[f64; 2]> = decimate(&o.path, 150).iter().map(|s| [s[0], s[1]]).collect();
                if dir < 0.0 {
                    pts.reverse();
                    pts.pop();
                }
                line.extend(pts);
            }
            out.push(line);
        }
    }
    out
}

/// One turn of the cycle through `start` around `focus`.
fn cycle_orbit(fs: &FloatSystem, focus: [f64; 2], start: [f64; 2]) -> Vec<[f64; 2]> {
    let s0 = to_sphere(start[0], start[1]);
    let mut path = vec![[s0[0], s0[1]]];
    let mut turned = 0.0;
    let mut prev = (start[1] - focus[1]).atan2(start[0] - focus[0]);
    let settings = Settings {
        max_steps: 20_000,
        ..Settings::default()
    };
    dopri5(
        |y: &[f64; 3]| fs.sphere(*y),
        s0,
        &settings,
        |_| {},
        |_, _, y| {
            path.push([y[0], y[1]]);
            if y[2] <= 0.0 {
                return Control::Stop;
            }
            let a = (y[1] / y[2] - focus[1]).atan2(y[0] / y[2] - focus[0]);
            let d = (a - prev + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
            turned += d;
            prev = a;
            if turned.abs() >= std::f64::consts::TAU {
                Control::Stop
            } else {
                Control::Continue
            }
        },
    );
    path
}

fn polyline(out: &mut String, pts: &[[f64; 2]], size: f64, style: &str) {
    if pts.len() < 2 {
        return;
    }
    let c = size / 2.0;
    let r = 0.46 * size;
    let _ = write!(out, r#"<polyline fill="none" {style} points=""#);
    for p in pts {
        let _ = write!(out, "{:.2},{:.2} ", c + r * p[0], c - r * p[1]);
    }
    out.push_str("\"/>\n");
}

fn glyph(out: &mut String, p: &SkeletonPoint, size: f64) {
    let c = size / 2.0;
    let r = 0.46 * size;
    let (x, y) = (c + r * p.disc[0], c - r * p.disc[1]);
    let fill = match p.stability {
        Stability::Stable => "#1f4e9c",
        Stability::Unstable => "#c0392b",
        Stability::None => "#ffffff",
    };
    let _ = if p.kind == SingularKind::SemiElementalNode && p.multiplicity == 3 {
        writeln!(
            out,
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{fill}" stroke="black"/>"#,
            x,
            y - 7.0,
            x - 6.0,
            y + 4.5,
            x + 6.0,
            y + 4.5
        )
    } else {
        writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4.5" fill="{fill}" stroke="black"/>"#)
    };
}

/// Disc portrait: thin filler orbits, wide separatrices, limit cycles,
/// disks for elemental points and a triangle for the triple node.
pub fn portrait_svg(sk: &Skeleton, size: u32) -> String {
    let [m, n, k] = sk.params;
    let fs = tn_system(&ParamPoint::from_f64(m, n, k)).float();
    let w = size as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(out, "<!-- trinode {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "<title>m = {m}, n = {n}, k = {k}</title>");
    let _ = writeln!(out, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
    for line in filler_orbits(&fs) {
        polyline(&mut out, &line, w, r##"stroke="#888" stroke-width="0.6""##);
    }
    for s in &sk.separatrices {
        polyline(&mut out, &s.path, w, r#"stroke="black" stroke-width="2.2""#);
    }
    for c in &sk.limit_cycles {
        let Place::Finite { x, y } = sk.points[c.focus].place else { continue };
        polyline(&mut out, &cycle_orbit(&fs, [x, y], c.point), w, r##"stroke="#d35400" stroke-width="2.2""##);
    }
    let _ = writeln!(
        out,
        r#"<circle cx="{0:.2}" cy="{0:.2}" r="{1:.2}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        w / 2.0,
        0.46 * w
    );
    for p in &sk.points {
        glyph(&mut out, p, w);
    }
    out.push_str("</svg>\n");
    out
}
