use std::fmt::Write as _;

use serde::Serialize;

use crate::config::{Format, ProblemConfig};
use crate::CliError;

pub const REPORT_SCHEMA: &str = "shapfx-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Engine {
    #[serde(rename = "closed-form")]
    ClosedForm,
    #[serde(rename = "exact-enumeration")]
    ExactEnumeration,
    #[serde(rename = "monte-carlo")]
    MonteCarlo,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::ClosedForm => "closed-form",
            Engine::ExactEnumeration => "exact-enumeration",
            Engine::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: String,
    pub config: ProblemConfig,
    pub engine: Engine,
    pub phi: Vec<f64>,
    /// `φ / sigma2`.
    pub phi_normalized: Vec<f64>,
    /// `val(1:d)`: the output variance for variance games, `E(max)` for `maxexp`.
    pub sigma2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se: Option<Vec<f64>>,
    /// Variables with `φ̂ⱼ < −3·seⱼ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anomalies: Option<Vec<usize>>,
    pub wall_time_seconds: f64,
}

/// 17 significant digits.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl Report {
    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Config(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// One row per variable; report-level fields repeat on each row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("variable,phi,phi_normalized,se,sigma2,engine,wall_time_seconds\n");
        for (j, (p, n)) in self.phi.iter().zip(&self.phi_normalized).enumerate() {
            let se = self.se.as_ref().map(|v| fmt_f64(v[j])).unwrap_or_default();
            let _ = writeln!(
                s,
                "{j},{},{},{se},{},{},{}",
                fmt_f64(*p),
                fmt_f64(*n),
                fmt_f64(self.sigma2),
                self.engine.as_str(),
                fmt_f64(self.wall_time_seconds)
            );
        }
        s
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => Ok(self.to_csv()),
        }
    }

    /// Copy with the wall-time field zeroed, for reproducibility comparisons.
    pub fn without_wall_time(&self) -> Self {
        Self {
            wall_time_seconds: 0.0,
            ..self.clone()
        }
    }
}
