use std::fmt;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use trinode::algebra::AlgNum;
use trinode::qsystem::ParamPoint;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

/// Machine-readable result of one command.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub diagnostics: Vec<String>,
    pub version: &'static str,
    /// Human-readable lines printed without `--json`.
    #[serde(skip)]
    pub text: Vec<String>,
}

impl Report {
    pub fn new(command: &str, inputs: Value) -> Self {
        Report {
            command: command.into(),
            inputs,
            outputs: Value::Null,
            diagnostics: Vec::new(),
            version: env!("CARGO_PKG_VERSION"),
            text: Vec::new(),
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Command failure carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Verification(Box<Report>),
    Inconclusive(Box<Report>),
    Other(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Verification(_) => EXIT_VERIFY,
            Failure::Inconclusive(_) => EXIT_INCONCLUSIVE,
            Failure::Other(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Verification(r) => write!(f, "{}: {} check(s) failed", r.command, r.diagnostics.len()),
            Failure::Inconclusive(r) => write!(f, "{}: inconclusive", r.command),
            Failure::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

/// A parameter as given on the command line.
#[derive(Clone, Debug)]
pub struct Param {
    pub text: String,
    pub value: AlgNum,
    pub inexact: bool,
}

impl Param {
    pub fn parse(name: &str, text: &str) -> Result<Param, Failure> {
        let (value, inexact) =
            AlgNum::parse(text).map_err(|e| Failure::Usage(format!("cannot read {name} = {text:?}: {e}")))?;
        if inexact {
            eprintln!(
                "warning: {name} = {text} read as a decimal; exact surface-membership tests degrade to tolerance 1e-12"
            );
        }
        Ok(Param { text: text.into(), value, inexact })
    }
}

pub fn params(m: &str, n: &str, k: &str) -> Result<([Param; 3], ParamPoint), Failure> {
    let (m, n, k) = (Param::parse("m", m)?, Param::parse("n", n)?, Param::parse("k", k)?);
    check_k(&k)?;
    let p = ParamPoint::new(m.value.clone(), n.value.clone(), k.value.clone()).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(([m, n, k], p))
}

pub fn check_k(k: &Param) -> Result<(), Failure> {
    if k.value.sign() < 0 {
        return Err(Failure::Usage(format!("k = {} is negative; only k >= 0 is considered", k.text)));
    }
    Ok(())
}

pub fn param_inputs(ps: &[Param; 3]) -> Value {
    let one = |p: &Param| serde_json::json!({ "text": p.text, "value": p.value, "inexact": p.inexact });
    serde_json::json!({ "m": one(&ps[0]), "n": one(&ps[1]), "k": one(&ps[2]) })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::Other(anyhow::anyhow!("cannot write {}: {e}", path.display())))
}
