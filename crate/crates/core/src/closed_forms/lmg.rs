//! R² partitioning among regression predictors (the LMG measure): the Shapley
//! value of the game `u ↦ R²_u`.

use nalgebra::DMatrix;

use crate::distributions::gaussian::check_square_symmetric;
use crate::error::{Error, Result};
use crate::game::{evaluate_all, shapley_exact, FnGame, ShapleyResult, TableGame};
use crate::index_set::IndexSet;

/// Largest admissible condition number of a predictor covariance block.
pub const MAX_CONDITION: f64 = 1e12;

/// Sample covariance (divisor `n − 1`) of the columns of `rows`.
pub fn covariance_from_data(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let k = rows.first().map(Vec::len).unwrap_or(0);
    if n < 2 || k == 0 || rows.iter().any(|r| r.len() != k) {
        return Err(Error::dimension(format!("need ≥ 2 rows of equal width, got {n}")));
    }
    let mut mean = vec![0.0; k];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v / n as f64;
        }
    }
    let mut cov = DMatrix::zeros(k, k);
    for r in rows {
        for i in 0..k {
            for j in 0..k {
                cov[(i, j)] += (r[i] - mean[i]) * (r[j] - mean[j]);
            }
        }
    }
    Ok(cov / (n - 1) as f64)
}

/// `R²_u = Σ_{yu} Σ_{uu}^{−1} Σ_{uy} / Σ_{yy}`; `cov` holds the predictors first
/// and the response in the last row and column.
pub fn r_squared(cov: &DMatrix<f64>, u: IndexSet) -> Result<f64> {
    let d = cov.nrows() - 1;
    if u.is_empty() {
        return Ok(0.0);
    }
    let idx = u.to_vec();
    let block = DMatrix::from_fn(idx.len(), idx.len(), |i, j| cov[(idx[i], idx[j])]);
    let eig = block.clone().symmetric_eigen().eigenvalues;
    let (min, max) = (eig.min(), eig.max());
    if !(min > 0.0) || max / min > MAX_CONDITION {
        return Err(Error::Singular(format!(
            "predictor block {u} has condition number {:.3e}",
            max / min
        )));
    }
    let cross = DMatrix::from_fn(idx.len(), 1, |i, _| cov[(idx[i], d)]);
    let solved = block
        .cholesky()
        .ok_or_else(|| Error::Singular(format!("predictor block {u} not positive definite")))?
        .solve(&cross);
    Ok(cross.dot(&solved) / cov[(d, d)])
}

/// LMG shares of `R²_{1:d}` from the `(d+1)×(d+1)` covariance of `(x, y)`.
pub fn lmg_shares(cov: &DMatrix<f64>) -> Result<ShapleyResult> {
    check_square_symmetric(cov)?;
    if cov.nrows() < 2 {
        return Err(Error::dimension("need at least one predictor and the response"));
    }
    let d = cov.nrows() - 1;
    if !(cov[(d, d)] > 0.0) {
        return Err(Error::domain("response has zero variance"));
    }
    // Validate every block once, then hand the tabulated game to the engine.
    let probe = FnGame::new(d, |u: IndexSet| r_squared(cov, u).unwrap_or(f64::NAN));
    let values = evaluate_all(&probe)?;
    if let Some(bad) = values.iter().position(|v| v.is_nan()) {
        return Err(r_squared(cov, IndexSet::from_mask(d, bad as u32)?).unwrap_err());
    }
    shapley_exact(&TableGame::new(d, values)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::next_permutation;

    #[test]
    fn uncorrelated_predictors_take_squared_correlations() {
        // x independent with variances 1, 4; y = x1 + 0.5 x2 + e, var(e) = 2
        let cov = DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 0.0, 1.0, 0.0, 4.0, 2.0, 1.0, 2.0, 4.0],
        );
        let r = lmg_shares(&cov).unwrap();
        let vy = 4.0;
        assert!((r.phi[0] - 1.0 / (1.0 * vy)).abs() < 1e-12);
        assert!((r.phi[1] - 4.0 / (4.0 * vy)).abs() < 1e-12);
        assert!((r.total - 0.5).abs() < 1e-12);
    }

    #[test]
    fn duplicate_predictor_rejected_and_near_twins_split_evenly() {
        let dup = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.5, 1.0, 1.0, 0.5, 0.5, 0.5, 1.0]);
        assert!(matches!(lmg_shares(&dup), Err(Error::Singular(_))));
        let twins = DMatrix::from_row_slice(3, 3, &[1.0, 0.9, 0.5, 0.9, 1.0, 0.5, 0.5, 0.5, 1.0]);
        let r = lmg_shares(&twins).unwrap();
        assert!((r.phi[0] - r.phi[1]).abs() < 1e-14);
    }

    #[test]
    fn matches_average_over_orders() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let t = i as f64;
                let x1 = (t * 0.37).sin();
                let x2 = (t * 0.11).cos() + 0.3 * x1;
                let x3 = ((t * 0.71).sin() - x2) * 0.5;
                vec![x1, x2, x3, x1 - 2.0 * x2 + 0.7 * x3 + 0.2 * (t * 1.3).cos()]
            })
            .collect();
        let cov = covariance_from_data(&rows).unwrap();
        let r = lmg_shares(&cov).unwrap();
        let mut order = vec![0usize, 1, 2];
        let mut acc = [0.0; 3];
        let mut count = 0.0;
        loop {
            let mut set = IndexSet::empty(3).unwrap();
            let mut prev = 0.0;
            for &j in &order {
                set = set.with(j);
                let now = r_squared(&cov, set).unwrap();
                acc[j] += now - prev;
                prev = now;
            }
            count += 1.0;
            if !next_permutation(&mut order) {
                break;
            }
        }
        for j in 0..3 {
            assert!((r.phi[j] - acc[j] / count).abs() < 1e-12);
        }
        assert!((r.phi.iter().sum::<f64>() - r_squared(&cov, IndexSet::full(3).unwrap()).unwrap()).abs() < 1e-12);
    }
}
