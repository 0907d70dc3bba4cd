//! Batch front end for `shapfx`: parse a problem configuration, dispatch it to
//! the matching engine and render a report.

pub mod config;
pub mod figure;
pub mod report;
pub mod selftest;

use std::time::Instant;

use nalgebra::DMatrix;
use shapfx_core::anova::{anova_decompose, shapley_from_components, GridAxis, ProductGrid};
use shapfx_core::closed_forms::{
    fgm_exponential_shapley, fgm_uniform_shapley, gaussian_linear_shapley, lognormal_bivariate_shapley,
    three_point_shapley, BivariateShapley, FgmProblem, GaussianLinearProblem, LognormalBivariateProblem,
    ThreePointProblem,
};
use shapfx_core::distributions::{
    discrete_value_function, Atom, DiscreteJoint, FgmModel, GaussianModel, IndependentModel, Margin, Model, Response,
};
use shapfx_core::estimator::{estimate_shapley, McConfig, ValueForm};
use shapfx_core::maxexp::{maxexp_shapley, ExponentialRates};
use shapfx_core::{shapley_exact, ShapleyResult};

pub use config::{parse_config, Format, Problem, ProblemConfig, CONFIG_SCHEMA};
pub use figure::{figure1, figure1_csv, parse_betas, rho_steps, Figure1Row};
pub use report::{Engine, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] shapfx_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 config, 3 capacity, 4 numerical domain.
    pub fn exit_code(&self) -> i32 {
        use shapfx_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(E::Capacity { .. }) => 3,
            CliError::Core(E::Dimension(_) | E::MissingSampler(_)) => 2,
            CliError::Core(E::Domain(_) | E::NotFullRank(_) | E::Singular(_)) => 4,
        }
    }
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, CliError> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(CliError::Config(format!("sigma: expected a square matrix with {d} rows of length {d}")));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

fn margin(m: config::MarginSpec) -> Margin {
    match m {
        config::MarginSpec::Uniform => Margin::Uniform,
        config::MarginSpec::Exponential => Margin::Exponential,
    }
}

fn from_bivariate(r: BivariateShapley) -> ShapleyResult {
    ShapleyResult {
        phi: r.phi().to_vec(),
        total: r.sigma2,
        calls: 0,
    }
}

fn build_model(model: &config::ModelSpec, response: &config::ResponseSpec) -> Result<Box<dyn Model>, CliError> {
    let response = match response {
        config::ResponseSpec::Linear { beta0, beta } => Response::Linear {
            beta0: *beta0,
            beta: beta.clone(),
        },
        config::ResponseSpec::ExpLinear { beta0, beta } => Response::ExpLinear {
            beta0: *beta0,
            beta: beta.clone(),
        },
    };
    Ok(match model {
        config::ModelSpec::Gaussian { mu, sigma } => {
            let sigma = matrix_from_rows(sigma)?;
            let mu = mu.clone().unwrap_or_else(|| vec![0.0; sigma.nrows()]);
            Box::new(GaussianModel::new(mu, sigma, response)?)
        }
        config::ModelSpec::Fgm { theta, margin: m } => Box::new(FgmModel::new(*theta, margin(*m), response)?),
        config::ModelSpec::Independent { margins } => {
            Box::new(IndependentModel::new(margins.iter().map(|&m| margin(m)).collect(), response)?)
        }
    })
}

/// Solves the configured problem. Stochastic fields are filled only for the
/// Monte Carlo engine.
pub fn run(cfg: &ProblemConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut se = None;
    let mut anomalies = None;
    let (engine, result) = match &cfg.problem {
        Problem::GaussianLinear { mu, sigma, beta0, beta } => {
            let sigma = matrix_from_rows(sigma)?;
            let mu = mu.clone().unwrap_or_else(|| vec![0.0; sigma.nrows()]);
            let p = GaussianLinearProblem::new(mu, sigma, *beta0, beta.clone())?;
            (Engine::ClosedForm, gaussian_linear_shapley(&p)?)
        }
        Problem::FgmUniform { theta, beta } => {
            let p = FgmProblem::new(*theta, *beta, Margin::Uniform)?;
            (Engine::ClosedForm, from_bivariate(fgm_uniform_shapley(&p)?))
        }
        Problem::FgmExponential { theta, beta } => {
            let p = FgmProblem::new(*theta, *beta, Margin::Exponential)?;
            (Engine::ClosedForm, from_bivariate(fgm_exponential_shapley(&p)?))
        }
        Problem::Lognormal2 { beta, rho } => {
            let p = LognormalBivariateProblem::new(*beta, *rho)?;
            (Engine::ClosedForm, from_bivariate(lognormal_bivariate_shapley(&p)?))
        }
        Problem::ThreePoint { p, y } => {
            let p = ThreePointProblem::new(*p, *y)?;
            (Engine::ClosedForm, from_bivariate(three_point_shapley(&p)?))
        }
        Problem::Maxexp { lambda } => {
            let rates = ExponentialRates::new(lambda.clone())?;
            (Engine::ClosedForm, maxexp_shapley(&rates)?)
        }
        Problem::DiscreteTable { atoms } => {
            let atoms = atoms
                .iter()
                .map(|a| Atom {
                    x: a.x.clone(),
                    p: a.p,
                    y: a.y,
                })
                .collect();
            let joint = DiscreteJoint::new(atoms)?;
            (Engine::ExactEnumeration, shapley_exact(&discrete_value_function(&joint))?)
        }
        Problem::AnovaGrid { axes, table } => {
            let axes = axes
                .iter()
                .map(|a| match &a.weights {
                    Some(w) => GridAxis::new(a.values.clone(), w.clone()),
                    None => GridAxis::uniform(a.values.clone()),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let grid = ProductGrid::new(axes)?;
            let dec = anova_decompose(table, &grid)?;
            (Engine::ExactEnumeration, shapley_from_components(&dec))
        }
        Problem::McGeneric { model, response } => {
            let s = cfg.mc.ok_or_else(|| CliError::Config("mc: required for kind mc_generic".into()))?;
            let form = match s.value_form {
                config::ValueFormSpec::Vce => ValueForm::Vce,
                config::ValueFormSpec::Ecv => ValueForm::Ecv,
            };
            let mc = McConfig::new(s.n_outer, s.n_inner, s.seed, form)?;
            let model = build_model(model, response)?;
            let r = estimate_shapley(model.as_ref(), &mc)?;
            se = Some(r.se.clone());
            anomalies = Some(r.anomalies.clone());
            let result = ShapleyResult {
                phi: r.phi_hat,
                total: r.sigma2_hat,
                calls: r.val_hat.len(),
            };
            (Engine::MonteCarlo, result)
        }
    };
    if !(result.total.is_finite() && result.total > 0.0) {
        return Err(shapfx_core::Error::Domain(format!("total value {} is not positive", result.total)).into());
    }
    Ok(Report {
        schema: report::REPORT_SCHEMA.to_string(),
        config: cfg.clone(),
        engine,
        phi_normalized: result.normalized(),
        phi: result.phi,
        sigma2: result.total,
        se,
        anomalies,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Parses, runs and renders in the configured format.
pub fn run_text(text: &str) -> Result<(ProblemConfig, String), CliError> {
    let cfg = parse_config(text)?;
    let report = run(&cfg)?;
    let rendered = report.render(cfg.output.format)?;
    Ok((cfg, rendered))
}
