//! Report envelope, tolerance policy and JSON/CSV rendering.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use surfhom_core::{linalg, FusionData, ValidationReport};

use crate::Format;

/// An error with its exit code: 1 for validation failures, 2 for usage.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<surfhom_core::Error> for Failure {
    fn from(e: surfhom_core::Error) -> Self {
        use surfhom_core::Error as E;
        match e {
            E::Pattern(_) | E::UnknownCandidate(_) | E::UnknownLabel(_) => Failure::usage(e.to_string()),
            other => Failure::invalid(other.to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Policy {
    #[serde(rename = "override")]
    pub override_tol: Option<f64>,
    pub entry: f64,
    pub rank: f64,
    pub psd_floor: f64,
    pub coherence: f64,
    pub cross_check: f64,
    pub identity: f64,
}

impl Policy {
    pub fn new(override_tol: Option<f64>) -> Result<Self, Failure> {
        if let Some(t) = override_tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Failure::usage(format!("--tol must be a positive number, got {t}")));
            }
        }
        Ok(Policy {
            override_tol,
            entry: linalg::ENTRY_TOL,
            rank: linalg::RANK_TOL,
            psd_floor: linalg::PSD_FLOOR,
            coherence: surfhom_core::fusion::verify::COHERENCE_TOL,
            cross_check: surfhom_core::fusion::CROSS_CHECK_TOL,
            identity: surfhom_core::gns::IDENTITY_TOL,
        })
    }

    /// Re-evaluates every check against the override, if any.
    pub fn apply(&self, mut r: ValidationReport) -> ValidationReport {
        if let Some(t) = self.override_tol {
            r.pass = true;
            for c in r.checks.iter_mut() {
                if c.note.is_none() {
                    c.threshold = t;
                    c.pass = c.residual < t;
                }
                r.pass &= c.pass;
            }
        }
        r
    }
}

/// A flat table for CSV output.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn checks(r: &ValidationReport) -> Self {
        Table {
            header: vec!["check", "residual", "threshold", "pass"],
            rows: r
                .checks
                .iter()
                .map(|c| vec![c.name.clone(), format!("{:e}", c.residual), format!("{:e}", c.threshold), c.pass.to_string()])
                .collect(),
        }
    }

    pub fn dims(data: &FusionData, dims: &[usize]) -> Self {
        Table {
            header: vec!["simple", "dim"],
            rows: dims.iter().enumerate().map(|(i, d)| vec![data.label(i).to_string(), d.to_string()]).collect(),
        }
    }
}

pub struct Outcome {
    pub pass: bool,
    pub body: Value,
    pub table: Table,
}

pub fn content_hash(data: &FusionData) -> String {
    let digest = Sha256::digest(data.canonical_text().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn render(
    format: Format,
    command: &str,
    source: &str,
    data: &FusionData,
    policy: &Policy,
    out: &Outcome,
) -> Result<String, Failure> {
    let hash = content_hash(data);
    let version = env!("CARGO_PKG_VERSION");
    match format {
        Format::Json => {
            let env = json!({
                "tool": "surfhom",
                "version": version,
                "command": command,
                "category": {"name": data.name(), "source": source, "sha256": hash},
                "tolerance": policy,
                "pass": out.pass,
                "report": out.body,
            });
            let mut s = serde_json::to_string_pretty(&env).map_err(|e| Failure::invalid(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut s = String::new();
            s.push_str(&format!("# surfhom {version} {command}\n"));
            s.push_str(&format!("# category {} {source} sha256={hash}\n", data.name()));
            let policy = serde_json::to_string(policy).map_err(|e| Failure::invalid(e.to_string()))?;
            s.push_str(&format!("# tolerance {policy}\n"));
            s.push_str(&format!("# pass {}\n", out.pass));
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Failure::invalid(e.to_string());
            w.write_record(&out.table.header).map_err(io)?;
            for row in &out.table.rows {
                w.write_record(row).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::invalid(e.to_string()))?;
            s.push_str(&String::from_utf8_lossy(&bytes));
            Ok(s)
        }
    }
}

/// Rounds away noise below `1e-13` so reports stay readable.
pub fn clean(x: f64) -> f64 {
    if x.abs() < 1e-13 {
        0.0
    } else {
        x
    }
}

pub fn complex(z: surfhom_core::linalg::C64) -> Value {
    json!([clean(z.re), clean(z.im)])
}
