//! Relative importance of the first input versus `|ρ|` for `exp(β₁x₁ + β₂x₂)`
//! with standard bivariate normal inputs.

use std::fmt::Write as _;

use shapfx_core::closed_forms::{lognormal_bivariate_shapley, LognormalBivariateProblem};

use crate::report::fmt_f64;
use crate::CliError;

pub const FIGURE1_HEADER: &str = "beta1,beta2,abs_rho,phi1_over_sigma2";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure1Row {
    pub beta: [f64; 2],
    pub abs_rho: f64,
    pub share: f64,
    /// The `|ρ| = 1` row, emitted as the analytic limit 1/2 rather than evaluated.
    pub endpoint: bool,
}

/// `k/(n+1)` for `k = 0..=n`: `n + 1` points in `[0, 1)`.
pub fn rho_steps(n: usize) -> Vec<f64> {
    (0..=n).map(|k| k as f64 / (n + 1) as f64).collect()
}

/// Parses `"8,1;4,1;2,1"`.
pub fn parse_betas(s: &str) -> Result<Vec<[f64; 2]>, CliError> {
    s.split(';')
        .map(|pair| {
            let v: Vec<f64> = pair
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Config(format!("betas: {pair:?}: {e}")))?;
            match v.as_slice() {
                [a, b] => Ok([*a, *b]),
                _ => Err(CliError::Config(format!("betas: {pair:?} is not a pair"))),
            }
        })
        .collect()
}

/// Evaluates each β pair at `ρ = |ρ|` for every grid point, then appends the
/// flagged endpoint row. Grid points must lie in `[0, 1)`.
pub fn figure1(betas: &[[f64; 2]], abs_rho_grid: &[f64]) -> Result<Vec<Figure1Row>, CliError> {
    if let Some(r) = abs_rho_grid.iter().find(|r| !(0.0..1.0).contains(*r)) {
        return Err(CliError::Config(format!(
            "rho grid point {r} outside [0, 1); the |rho| = 1 limit is emitted separately"
        )));
    }
    let mut rows = Vec::with_capacity(betas.len() * (abs_rho_grid.len() + 1));
    for &beta in betas {
        for &r in abs_rho_grid {
            let p = LognormalBivariateProblem::new(beta, r)?;
            rows.push(Figure1Row {
                beta,
                abs_rho: r,
                share: lognormal_bivariate_shapley(&p)?.share1(),
                endpoint: false,
            });
        }
        LognormalBivariateProblem::new(beta, 1.0)?;
        rows.push(Figure1Row {
            beta,
            abs_rho: 1.0,
            share: 0.5,
            endpoint: true,
        });
    }
    Ok(rows)
}

pub fn figure1_csv(rows: &[Figure1Row]) -> String {
    let mut s = format!("{FIGURE1_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_f64(r.beta[0]),
            fmt_f64(r.beta[1]),
            fmt_f64(r.abs_rho),
            fmt_f64(r.share)
        );
    }
    s
}
