//! Residual reports shared by the verification batteries.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ValidationReport {
    pub fn new() -> Self {
        ValidationReport {
            checks: Vec::new(),
            pass: true,
        }
    }

    /// Records `residual < threshold`. NaN residuals fail.
    pub fn record(&mut self, name: impl Into<String>, residual: f64, threshold: f64) -> &mut Check {
        let pass = residual < threshold;
        self.pass &= pass;
        self.checks.push(Check {
            name: name.into(),
            residual,
            threshold,
            pass,
            note: None,
        });
        self.checks.last_mut().unwrap()
    }

    /// Records a check that could not be evaluated.
    pub fn fail(&mut self, name: impl Into<String>, note: impl Into<String>) {
        self.pass = false;
        self.checks.push(Check {
            name: name.into(),
            residual: f64::NAN,
            threshold: 0.0,
            pass: false,
            note: Some(note.into()),
        });
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn residual(&self, name: &str) -> f64 {
        self.get(name).map(|c| c.residual).unwrap_or(f64::NAN)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}
