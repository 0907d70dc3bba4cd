use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::game::ValueFunction;
use crate::index_set::IndexSet;

/// Symmetry tolerance, relative to the largest entry.
const SYMMETRY_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue ratio `λ_min / λ_max` for a full-rank covariance.
pub const FULL_RANK_RATIO: f64 = 1e-10;

pub(crate) fn check_square_symmetric(sigma: &DMatrix<f64>) -> Result<()> {
    if sigma.nrows() != sigma.ncols() || sigma.nrows() == 0 {
        return Err(Error::dimension(format!(
            "covariance is {}×{}",
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    if sigma.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("covariance has non-finite entries"));
    }
    let scale = sigma.amax().max(1.0);
    let d = sigma.nrows();
    for i in 0..d {
        for j in (i + 1)..d {
            if (sigma[(i, j)] - sigma[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::domain(format!(
                    "covariance not symmetric at ({i},{j}): {} vs {}",
                    sigma[(i, j)],
                    sigma[(j, i)]
                )));
            }
        }
    }
    Ok(())
}

/// Rejects covariances whose smallest eigenvalue is below `1e-10` of the largest.
pub fn check_full_rank(sigma: &DMatrix<f64>) -> Result<()> {
    check_square_symmetric(sigma)?;
    let eig = sigma.clone().symmetric_eigen().eigenvalues;
    let max = eig.max();
    let min = eig.min();
    if !(max > 0.0) || min < FULL_RANK_RATIO * max {
        return Err(Error::NotFullRank(format!(
            "eigenvalues span [{min:.3e}, {max:.3e}]"
        )));
    }
    Ok(())
}

fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn subvector(v: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    DVector::from_fn(idx.len(), |i, _| v[idx[i]])
}

/// Law of `x_{−u}` given `x_u` for `x ~ N(μ, Σ)`.
///
/// The conditional covariance (Schur complement) does not depend on the
/// conditioning value; only the mean does.
#[derive(Debug, Clone)]
pub struct GaussianConditional {
    given: IndexSet,
    given_idx: Vec<usize>,
    rest_idx: Vec<usize>,
    mu_given: DVector<f64>,
    mu_rest: DVector<f64>,
    given_precision: DMatrix<f64>,
    /// `Σ_{−u,u} Σ_{uu}^{−1}`
    regression: DMatrix<f64>,
    /// `Σ_{−u,−u} − Σ_{−u,u} Σ_{uu}^{−1} Σ_{u,−u}`
    covariance: DMatrix<f64>,
}

impl GaussianConditional {
    pub fn given(&self) -> IndexSet {
        self.given
    }

    /// Zero-based indices of the conditioned coordinates, ascending.
    pub fn given_indices(&self) -> &[usize] {
        &self.given_idx
    }

    /// Zero-based indices of the free coordinates, ascending.
    pub fn rest_indices(&self) -> &[usize] {
        &self.rest_idx
    }

    /// `Σ_{uu}^{−1}` (empty when `u = ∅`).
    pub fn given_precision(&self) -> &DMatrix<f64> {
        &self.given_precision
    }

    pub fn regression(&self) -> &DMatrix<f64> {
        &self.regression
    }

    /// `var(x_{−u} | x_u)`, rows and columns ordered as [`rest_indices`](Self::rest_indices).
    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// `E(x_{−u} | x_u)`; `x_given` is ordered as [`given_indices`](Self::given_indices).
    pub fn mean(&self, x_given: &[f64]) -> Result<DVector<f64>> {
        if x_given.len() != self.given_idx.len() {
            return Err(Error::dimension(format!(
                "{} conditioning values for |u| = {}",
                x_given.len(),
                self.given_idx.len()
            )));
        }
        let dev = DVector::from_column_slice(x_given) - &self.mu_given;
        Ok(&self.mu_rest + &self.regression * dev)
    }

    fn rest_position(&self, j: usize) -> Option<usize> {
        self.rest_idx.iter().position(|&k| k == j)
    }

    /// `var(x_j | x_u)` for a free coordinate `j`.
    pub fn variance_of(&self, j: usize) -> Option<f64> {
        let p = self.rest_position(j)?;
        Some(self.covariance[(p, p)])
    }

    /// `cov(x_j, wᵀx_{−u} | x_u)` where `w` is indexed like the full vector and
    /// only its free coordinates are used.
    pub fn covariance_with(&self, j: usize, w: &[f64]) -> Option<f64> {
        let p = self.rest_position(j)?;
        Some(
            self.rest_idx
                .iter()
                .enumerate()
                .map(|(q, &k)| self.covariance[(p, q)] * w[k])
                .sum(),
        )
    }

    /// `var(wᵀx_{−u} | x_u)`.
    pub fn quadratic_form(&self, w: &[f64]) -> f64 {
        let wr = DVector::from_fn(self.rest_idx.len(), |i, _| w[self.rest_idx[i]]);
        wr.dot(&(&self.covariance * &wr))
    }
}

/// Conditions `N(μ, Σ)` on the coordinates in `u`.
pub fn gaussian_condition(mu: &DVector<f64>, sigma: &DMatrix<f64>, u: IndexSet) -> Result<GaussianConditional> {
    check_square_symmetric(sigma)?;
    let d = sigma.nrows();
    if mu.len() != d || u.players() != d {
        return Err(Error::dimension(format!(
            "mean has {} entries, covariance is {d}×{d}, set over {} players",
            mu.len(),
            u.players()
        )));
    }
    let given_idx = u.to_vec();
    let rest_idx = u.complement().to_vec();
    let s_gg = submatrix(sigma, &given_idx, &given_idx);
    let s_rg = submatrix(sigma, &rest_idx, &given_idx);
    let s_rr = submatrix(sigma, &rest_idx, &rest_idx);

    let given_precision = if given_idx.is_empty() {
        DMatrix::zeros(0, 0)
    } else {
        s_gg.cholesky()
            .ok_or_else(|| Error::Singular(format!("Σ_uu is not positive definite for u = {u}")))?
            .inverse()
    };
    let regression = &s_rg * &given_precision;
    let mut covariance = s_rr - &regression * s_rg.transpose();
    // Symmetrize away rounding.
    let ct = covariance.transpose();
    covariance = (covariance + ct) * 0.5;

    Ok(GaussianConditional {
        given: u,
        mu_given: subvector(mu, &given_idx),
        mu_rest: subvector(mu, &rest_idx),
        given_idx,
        rest_idx,
        given_precision,
        regression,
        covariance,
    })
}

/// `N(μ, Σ)` with a cached Cholesky factor.
#[derive(Debug, Clone)]
pub struct MultivariateGaussian {
    mu: DVector<f64>,
    sigma: DMatrix<f64>,
    lower: DMatrix<f64>,
}

impl MultivariateGaussian {
    pub fn new(mu: DVector<f64>, sigma: DMatrix<f64>) -> Result<Self> {
        check_full_rank(&sigma)?;
        if mu.len() != sigma.nrows() {
            return Err(Error::dimension(format!(
                "mean has {} entries, covariance is {}×{}",
                mu.len(),
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        let lower = sigma
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NotFullRank("Cholesky factorization failed".into()))?
            .l();
        Ok(Self { mu, sigma, lower })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let z = DVector::from_fn(self.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        let x = &self.mu + &self.lower * z;
        out.copy_from_slice(x.as_slice());
    }

    pub fn condition(&self, u: IndexSet) -> Result<GaussianConditional> {
        gaussian_condition(&self.mu, &self.sigma, u)
    }
}

/// Exact variance-explained game for `f(x) = β₀ + βᵀx`, `x ~ N(μ, Σ)`:
/// `val(u) = βᵀΣβ − βᵀ_{−u} var(x_{−u} | x_u) β_{−u}`.
#[derive(Debug, Clone)]
pub struct GaussianLinearGame {
    mu: DVector<f64>,
    sigma: DMatrix<f64>,
    beta: Vec<f64>,
    total: f64,
}

impl GaussianLinearGame {
    pub fn new(sigma: DMatrix<f64>, beta: Vec<f64>) -> Result<Self> {
        check_full_rank(&sigma)?;
        let d = sigma.nrows();
        if beta.len() != d {
            return Err(Error::dimension(format!("β has {} entries, d = {d}", beta.len())));
        }
        let b = DVector::from_column_slice(&beta);
        let total = b.dot(&(&sigma * &b));
        Ok(Self {
            mu: DVector::zeros(d),
            sigma,
            beta,
            total,
        })
    }

    pub fn variance(&self) -> f64 {
        self.total
    }
}

impl ValueFunction for GaussianLinearGame {
    fn players(&self) -> usize {
        self.beta.len()
    }

    fn value(&self, u: IndexSet) -> f64 {
        if u.is_empty() {
            return 0.0;
        }
        let cond = gaussian_condition(&self.mu, &self.sigma, u)
            .expect("full-rank covariance conditions on every subset");
        self.total - cond.quadratic_form(&self.beta)
    }
}
