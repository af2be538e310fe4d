use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};
use trinode::atlas::{atlas, Status};
use trinode::bifurcation::{trace_slice, verify_lemmas, Curve, SignVector, SurfaceId, Window};
use trinode::classify::{
    invariants_with, label, table_collisions, tables, InvariantTuple, PortraitLabel,
};
use trinode::portrait::{
    conic_certificate, detect_graphics, portrait_svg, skeleton, trace_connection_curve, ParityPoint, RootBranch,
    Skeleton,
};
use trinode::qsystem::ParamPoint;
use trinode::Error;

use crate::report::{param_inputs, params, write_file, Failure, Param, Report};

fn surfaces_on(ps: &[Param; 3], p: &ParamPoint) -> (Option<SignVector>, Vec<&'static str>) {
    if ps.iter().any(|q| q.inexact) {
        let [m, n, k] = p.approx();
        let on = SurfaceId::ALL
            .into_iter()
            .filter(|s| {
                let (v, scale) = s.eval_f64(m, n, k);
                v.abs() <= 1e-12 * scale.max(1.0)
            })
            .map(|s| s.symbol())
            .collect();
        (None, on)
    } else {
        let sv = SignVector::of(p);
        let on = SurfaceId::ALL.into_iter().filter(|s| sv.get(*s) == 0).map(|s| s.symbol()).collect();
        (Some(sv), on)
    }
}

fn points_json(sk: &Skeleton) -> Value {
    Value::Array(
        sk.points
            .iter()
            .map(|p| {
                json!({
                    "id": p.id,
                    "place": p.place,
                    "kind": p.kind,
                    "stability": p.stability,
                    "multiplicity": p.multiplicity,
                    "index": p.index,
                })
            })
            .collect(),
    )
}

fn skeleton_or_fail(report: &Report, p: &ParamPoint) -> Result<Skeleton, Failure> {
    skeleton(p).map_err(|e| match e {
        Error::Algebra(_) | Error::Data(_) => Failure::Other(e.into()),
        _ => {
            let mut r = report.clone();
            r.diagnostics.push(e.to_string());
            Failure::Inconclusive(Box::new(r))
        }
    })
}

/// Tuple and label of a skeleton; the report gets the diagnostics.
fn label_skeleton(report: &mut Report, sk: &Skeleton, tol: f64) -> (Option<InvariantTuple>, Option<PortraitLabel>) {
    report.diagnostics.extend(sk.diagnostics.iter().cloned());
    let t = match invariants_with(sk, tol) {
        Ok(t) => t,
        Err(e) => {
            if !sk.partial {
                report.diagnostics.push(e.to_string());
            }
            return (None, None);
        }
    };
    match label(&t) {
        Ok(l) => (Some(t), Some(l)),
        Err(e) => {
            report.diagnostics.push(e.to_string());
            (Some(t), None)
        }
    }
}

fn finish(report: Report, conclusive: bool) -> Result<Report, Failure> {
    if conclusive {
        Ok(report)
    } else {
        Err(Failure::Inconclusive(Box::new(report)))
    }
}

pub fn classify(m: &str, n: &str, k: &str, tol: f64) -> Result<Report, Failure> {
    let (ps, p) = params(m, n, k)?;
    let mut report = Report::new("classify", json!({ "params": param_inputs(&ps), "tol": tol }));
    let (sv, on) = surfaces_on(&ps, &p);
    if !on.is_empty() {
        report.line(format!("on surfaces: {}", on.join(", ")));
    }
    let mut sk = skeleton_or_fail(&report, &p)?;
    for pt in &sk.points {
        report.line(format!(
            "point {}: {:?} {:?} {:?} multiplicity {}{}",
            pt.id,
            pt.place,
            pt.kind,
            pt.stability,
            pt.multiplicity,
            pt.index.map(|i| format!(" index {i}")).unwrap_or_default()
        ));
    }
    let (t, l) = label_skeleton(&mut report, &sk, tol);
    let graphics = detect_graphics(&sk, tol).map(|g| g.len()).ok();
    if let Some(t) = &t {
        report.line(format!("invariants: {t}"));
    }
    report.line(match &l {
        Some(l) => format!("label: {l}"),
        None => "label: unclassified".into(),
    });
    report.outputs = json!({
        "sign_vector": sv,
        "on_surfaces": on,
        "points": points_json(&sk),
        "limit_cycles": std::mem::take(&mut sk.limit_cycles),
        "graphics": graphics,
        "tuple": t,
        "label": l.as_ref().map(|l| l.to_string()),
        "adornment": l.as_ref().map(|l| l.adornment),
    });
    let ok = l.is_some();
    finish(report, ok)
}

pub struct SliceArgs<'a> {
    pub k: &'a str,
    pub window: Window,
    pub resolution: usize,
    pub with_s7: bool,
    pub s7_lines: usize,
    pub out: &'a Path,
}

pub fn slice(a: SliceArgs<'_>) -> Result<Report, Failure> {
    let k = Param::parse("k", a.k)?;
    crate::report::check_k(&k)?;
    if a.resolution < 16 {
        return Err(Failure::Usage("resolution must be at least 16".into()));
    }
    let mut report = Report::new(
        "slice",
        json!({ "k": { "text": k.text, "value": k.value, "inexact": k.inexact }, "window": a.window,
                "resolution": a.resolution, "with_s7": a.with_s7 }),
    );
    let mut diagram = trace_slice(&k.value, a.window, a.resolution).map_err(|e| Failure::Other(e.into()))?;
    if a.with_s7 {
        let kf = k.value.to_f64();
        if kf * kf > 8.0 {
            let pts = trace_connection_curve(kf, a.window.m, a.window.n.0, a.s7_lines, 1e-8);
            report.line(format!("S7: {} connection points", pts.len()));
            diagram.add_curve(Curve {
                surface: "S7".into(),
                color: "purple".into(),
                multiplicity: 1,
                segments: pts.windows(2).map(|w| [[w[0][0], w[0][1]], [w[1][0], w[1][1]]]).collect(),
                error_bounds: Some(pts.iter().map(|p| p[2]).collect()),
            });
            if pts.len() < 2 {
                report.diagnostics.push("S7: fewer than two connection points resolved in the window".into());
            }
        } else {
            report.diagnostics.push("S7 exists only for k > 2 sqrt 2; not traced".into());
        }
    }
    for c in &diagram.curves {
        report.line(format!(
            "curve {} ({}) multiplicity {}: {} segments",
            c.surface,
            c.color,
            c.multiplicity,
            c.segments.len()
        ));
    }
    report.line(format!("{} regions", diagram.regions.len()));
    let svg = a.out.with_extension("svg");
    let js = a.out.with_extension("json");
    write_file(&svg, &diagram.to_svg(800))?;
    report.outputs = json!({
        "exact_k": !k.value.is_rational() || !k.inexact,
        "svg": svg.display().to_string(),
        "json": js.display().to_string(),
        "curves": diagram.curves.iter().map(|c| json!({
            "surface": c.surface, "color": c.color, "multiplicity": c.multiplicity, "segments": c.segments.len(),
        })).collect::<Vec<_>>(),
        "regions": diagram.regions_json(),
    });
    write_file(&js, &serde_json::to_string_pretty(&json!({ "report": &report, "diagram": diagram })).expect("json"))?;
    Ok(report)
}

pub fn portrait(m: &str, n: &str, k: &str, out: &Path, size: u32, skeleton_json: Option<&Path>) -> Result<Report, Failure> {
    let (ps, p) = params(m, n, k)?;
    let mut report = Report::new("portrait", json!({ "params": param_inputs(&ps), "size": size }));
    let sk = skeleton_or_fail(&report, &p)?;
    write_file(out, &portrait_svg(&sk, size))?;
    report.line(format!("wrote {}", out.display()));
    if let Some(path) = skeleton_json {
        write_file(path, &(serde_json::to_string_pretty(&sk).expect("json") + "\n"))?;
        report.line(format!("wrote {}", path.display()));
    }
    let (t, l) = label_skeleton(&mut report, &sk, 0.0);
    report.line(format!("limit cycles: {}", sk.limit_cycles.len()));
    if let Some(l) = &l {
        report.line(format!("label: {l}"));
    }
    report.outputs = json!({
        "svg": out.display().to_string(),
        "limit_cycles": sk.limit_cycles,
        "graphics": detect_graphics(&sk, 0.0).ok(),
        "tuple": t,
        "label": l.as_ref().map(|l| l.to_string()),
    });
    let ok = l.is_some();
    finish(report, ok)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Scope {
    Lemmas,
    Prop8,
    Tables,
    All,
}

struct Check {
    scope: &'static str,
    name: String,
    passed: bool,
    detail: Value,
}

fn lemma_checks() -> Vec<Check> {
    let r = verify_lemmas();
    let mut groups: Vec<String> = Vec::new();
    for c in &r.checks {
        if !groups.contains(&c.lemma) {
            groups.push(c.lemma.clone());
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let checks: Vec<_> = r.checks.iter().filter(|c| c.lemma == g).collect();
            Check {
                scope: if g.starts_with('L') || g.starts_with('C') { "lemmas" } else { "surfaces" },
                passed: r.lemma_passed(&g),
                detail: json!(checks),
                name: g,
            }
        })
        .collect()
}

fn prop8_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for pp in [ParityPoint::Even, ParityPoint::Odd] {
        let p = pp.param_point();
        let expected = pp.expected();
        let h = pp.conic(RootBranch::Absolute);
        let (passed, detail) = match conic_certificate(&p, &h, 10_000) {
            Ok(c) => (c.verdict == expected, json!(c)),
            Err(f) => (false, json!({ "failure": f.to_string(), "report": f })),
        };
        out.push(Check { scope: "prop8", name: format!("conic certificate at {:?}", pp.params()), passed, detail });
        let (passed, detail) = match skeleton(&p) {
            Ok(sk) => {
                let n = sk.limit_cycles.len();
                let ok = match expected {
                    trinode::portrait::Parity::Even => n % 2 == 0,
                    trinode::portrait::Parity::Odd => n % 2 == 1,
                };
                (ok, json!({ "expected": expected, "cycles": n }))
            }
            Err(e) => (false, json!({ "error": e.to_string() })),
        };
        out.push(Check { scope: "prop8", name: format!("return-map parity at {:?}", pp.params()), passed, detail });
    }
    out
}

fn table_checks() -> Vec<Check> {
    let t = tables();
    let mut parts: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &t.table2 {
        *parts.entry(e.part.as_str()).or_default() += 1;
    }
    let dims: Vec<usize> = [3, 2, 1, 0].iter().map(|d| t.table2.iter().filter(|e| e.dimension == *d).count()).collect();
    let collisions = table_collisions();
    vec![
        Check { scope: "tables", name: "28 representative tuples".into(), passed: t.table1.len() == 28, detail: json!(t.table1.len()) },
        Check { scope: "tables", name: "tuples pairwise distinct".into(), passed: collisions.is_empty(), detail: json!(collisions) },
        Check {
            scope: "tables",
            name: "63 parts, each once".into(),
            passed: parts.len() == 63 && parts.values().all(|c| *c == 1),
            detail: json!(parts.len()),
        },
        Check { scope: "tables", name: "dimension split 17/29/15/2".into(), passed: dims == [17, 29, 15, 2], detail: json!(dims) },
    ]
}

pub fn verify(scope: Scope) -> Result<Report, Failure> {
    let mut report = Report::new("verify", json!({ "scope": format!("{scope:?}").to_lowercase() }));
    let mut checks = Vec::new();
    if matches!(scope, Scope::Lemmas | Scope::All) {
        checks.extend(lemma_checks());
    }
    if matches!(scope, Scope::Prop8 | Scope::All) {
        checks.extend(prop8_checks());
    }
    if matches!(scope, Scope::Tables | Scope::All) {
        checks.extend(table_checks());
    }
    for c in &checks {
        report.line(format!("[{}] {} {}", if c.passed { "pass" } else { "FAIL" }, c.scope, c.name));
        if !c.passed {
            report.diagnostics.push(format!("{}: {} failed", c.scope, c.name));
        }
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    report.line(format!("{passed}/{} passed", checks.len()));
    report.outputs = Value::Array(
        checks
            .iter()
            .map(|c| json!({ "scope": c.scope, "name": c.name, "passed": c.passed, "detail": c.detail }))
            .collect(),
    );
    if passed == checks.len() {
        Ok(report)
    } else {
        Err(Failure::Verification(Box::new(report)))
    }
}

pub fn atlas_cmd(ks: &[String], grid: usize, window: Window, out: Option<&Path>) -> Result<Report, Failure> {
    let ks: Vec<Param> = ks.iter().map(|k| Param::parse("k", k)).collect::<Result<_, _>>()?;
    for k in &ks {
        crate::report::check_k(k)?;
    }
    if grid < 16 {
        return Err(Failure::Usage("grid must be at least 16".into()));
    }
    let mut report = Report::new(
        "atlas",
        json!({ "k": ks.iter().map(|k| &k.text).collect::<Vec<_>>(), "grid": grid, "window": window }),
    );
    let values: Vec<_> = ks.iter().map(|k| k.value.clone()).collect();
    let a = atlas(&values, window, grid).map_err(|e| Failure::Other(e.into()))?;
    for s in &a.slices {
        let mut labels: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &s.regions {
            *labels.entry(r.label.as_deref().unwrap_or("-")).or_default() += 1;
        }
        let summary: Vec<String> = labels.iter().map(|(l, c)| format!("{l}:{c}")).collect();
        report.line(format!("k = {} ({:.6}): {} regions; {}", s.k, s.k_approx, s.regions.len(), summary.join(" ")));
    }
    for (s, r) in a.flagged() {
        report.diagnostics.push(format!(
            "k = {}, region {} at ({:.6}, {:.6}): {:?} {}",
            s.k,
            r.id,
            r.representative[0],
            r.representative[1],
            r.status,
            r.diagnostic.as_deref().unwrap_or("")
        ));
    }
    let flagged = a.flagged().count();
    report.line(format!("{flagged} regions flagged"));
    debug_assert!(a.slices.iter().all(|s| s.regions.iter().all(|r| r.status != Status::Classified || r.label.is_some())));
    report.outputs = serde_json::to_value(&a).expect("atlas serializes");
    if let Some(path) = out {
        write_file(path, &report.to_json())?;
    }
    Ok(report)
}
