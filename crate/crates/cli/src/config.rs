//! Problem configuration: strict JSON with a versioned `schema` field.

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CONFIG_SCHEMA: &str = "shapfx/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub schema: String,
    pub problem: Problem,
    /// Estimator settings; required for `mc_generic`, rejected elsewhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSettings>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Problem {
    GaussianLinear {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mu: Option<Vec<f64>>,
        /// Rows of Σ.
        sigma: Vec<Vec<f64>>,
        #[serde(default)]
        beta0: f64,
        beta: Vec<f64>,
    },
    FgmUniform {
        theta: f64,
        beta: [f64; 2],
    },
    FgmExponential {
        theta: f64,
        beta: [f64; 2],
    },
    #[serde(rename = "lognormal2")]
    Lognormal2 {
        beta: [f64; 2],
        rho: f64,
    },
    ThreePoint {
        p: [f64; 3],
        y: [f64; 3],
    },
    Maxexp {
        lambda: Vec<f64>,
    },
    DiscreteTable {
        atoms: Vec<AtomSpec>,
    },
    AnovaGrid {
        axes: Vec<AxisSpec>,
        /// Function values in row-major order (last axis fastest).
        table: Vec<f64>,
    },
    McGeneric {
        model: ModelSpec,
        response: ResponseSpec,
    },
}

impl Problem {
    pub fn kind(&self) -> &'static str {
        match self {
            Problem::GaussianLinear { .. } => "gaussian_linear",
            Problem::FgmUniform { .. } => "fgm_uniform",
            Problem::FgmExponential { .. } => "fgm_exponential",
            Problem::Lognormal2 { .. } => "lognormal2",
            Problem::ThreePoint { .. } => "three_point",
            Problem::Maxexp { .. } => "maxexp",
            Problem::DiscreteTable { .. } => "discrete_table",
            Problem::AnovaGrid { .. } => "anova_grid",
            Problem::McGeneric { .. } => "mc_generic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub x: Vec<f64>,
    pub p: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub values: Vec<f64>,
    /// Level probabilities; uniform when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginSpec {
    Uniform,
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Gaussian {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mu: Option<Vec<f64>>,
        sigma: Vec<Vec<f64>>,
    },
    Fgm {
        theta: f64,
        margin: MarginSpec,
    },
    Independent {
        margins: Vec<MarginSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum ResponseSpec {
    Linear {
        #[serde(default)]
        beta0: f64,
        beta: Vec<f64>,
    },
    ExpLinear {
        #[serde(default)]
        beta0: f64,
        beta: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueFormSpec {
    Vce,
    Ecv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSettings {
    pub n_outer: usize,
    pub n_inner: usize,
    pub seed: u64,
    #[serde(default = "default_form")]
    pub value_form: ValueFormSpec,
}

fn default_form() -> ValueFormSpec {
    ValueFormSpec::Vce
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Report destination; stdout when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

/// Parses and structurally validates a configuration. Parse errors carry the
/// line, column and offending field from the JSON reader.
pub fn parse_config(text: &str) -> Result<ProblemConfig, CliError> {
    let cfg: ProblemConfig = serde_json::from_str(text).map_err(|e| CliError::Config(format!("{e}")))?;
    if cfg.schema != CONFIG_SCHEMA {
        return Err(CliError::Config(format!(
            "schema: expected \"{CONFIG_SCHEMA}\", found \"{}\"",
            cfg.schema
        )));
    }
    match (&cfg.problem, &cfg.mc) {
        (Problem::McGeneric { .. }, None) => {
            return Err(CliError::Config("mc: required for kind mc_generic".into()));
        }
        (p, Some(_)) if !matches!(p, Problem::McGeneric { .. }) => {
            return Err(CliError::Config(format!("mc: not accepted for kind {}", p.kind())));
        }
        _ => {}
    }
    Ok(cfg)
}
