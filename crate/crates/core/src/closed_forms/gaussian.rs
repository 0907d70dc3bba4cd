use nalgebra::{DMatrix, DVector};

use crate::distributions::gaussian::{check_full_rank, check_square_symmetric, gaussian_condition, GaussianLinearGame};
use crate::error::{Error, Result};
use crate::game::{shapley_weight, ShapleyResult, ValueFunction, EXACT_MAX_PLAYERS};
use crate::index_set::{IndexSet, MAX_PLAYERS};

/// `f(x) = β₀ + βᵀx` with `x ~ N(μ, Σ)`, `Σ` of full rank.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianLinearProblem {
    pub mu: DVector<f64>,
    pub sigma: DMatrix<f64>,
    pub beta0: f64,
    pub beta: DVector<f64>,
}

impl GaussianLinearProblem {
    pub fn new(mu: Vec<f64>, sigma: DMatrix<f64>, beta0: f64, beta: Vec<f64>) -> Result<Self> {
        let d = sigma.nrows();
        if mu.len() != d || beta.len() != d {
            return Err(Error::dimension(format!(
                "μ has {} entries, β has {}, Σ is {}×{}",
                mu.len(),
                beta.len(),
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        check_full_rank(&sigma)?;
        Ok(Self {
            mu: DVector::from_vec(mu),
            sigma,
            beta0,
            beta: DVector::from_vec(beta),
        })
    }

    pub fn dim(&self) -> usize {
        self.beta.len()
    }

    /// `var(f) = βᵀΣβ`.
    pub fn variance(&self) -> f64 {
        self.beta.dot(&(&self.sigma * &self.beta))
    }

    /// The exact game `u ↦ var(E(f | x_u))`.
    pub fn game(&self) -> Result<GaussianLinearGame> {
        GaussianLinearGame::new(self.sigma.clone(), self.beta.as_slice().to_vec())
    }
}

/// Masks per reduction block; partial sums are combined in block order so the
/// result does not depend on the worker count.
const BLOCK: u32 = 1 << 10;

/// Shapley effects of a Gaussian linear function:
/// `φⱼ = Σ_{u⊆−j} w(|u|) · cov(xⱼ, βᵀ_{−u}x_{−u} | x_u)² / var(xⱼ | x_u)`.
pub fn gaussian_linear_shapley(p: &GaussianLinearProblem) -> Result<ShapleyResult> {
    use rayon::prelude::*;

    let d = p.dim();
    if d == 0 || d > MAX_PLAYERS.min(EXACT_MAX_PLAYERS) {
        return Err(Error::capacity(
            "Gaussian linear Shapley",
            d,
            EXACT_MAX_PLAYERS,
            format!("2^{d} conditional covariances"),
        ));
    }
    let weights: Vec<f64> = (0..d).map(|k| shapley_weight(d, k)).collect::<Result<_>>()?;
    let beta = p.beta.as_slice();
    let n = 1u32 << d;
    let n_blocks = n.div_ceil(BLOCK);

    let partials: Vec<Result<Vec<f64>>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![0.0; d];
            for mask in (b * BLOCK)..((b + 1) * BLOCK).min(n) {
                if mask == n - 1 {
                    continue;
                }
                let u = IndexSet::from_mask_unchecked(d, mask);
                let cond = gaussian_condition(&p.mu, &p.sigma, u)?;
                let w = weights[u.len()];
                for j in u.complement().iter() {
                    let c = cond.covariance_with(j, beta).expect("j is free");
                    let v = cond.variance_of(j).expect("j is free");
                    acc[j] += w * c * c / v;
                }
            }
            Ok(acc)
        })
        .collect();

    let mut phi = vec![0.0; d];
    for part in partials {
        for (a, b) in phi.iter_mut().zip(part?) {
            *a += b;
        }
    }
    Ok(ShapleyResult {
        phi,
        total: p.variance(),
        calls: n as usize,
    })
}

/// Shapley values of the game `val(u) = var(Σ_{j∈u} xⱼ)`: `φⱼ = cov(xⱼ, Σₖ xₖ)`,
/// the `j`-th row sum of `Σ`. These can be negative.
pub fn variance_game_shapley(sigma: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_square_symmetric(sigma)?;
    Ok(sigma.row_iter().map(|r| r.sum()).collect())
}

/// `val(u) = var(Σ_{j∈u} xⱼ) = Σ_{i,j∈u} Σᵢⱼ`.
#[derive(Debug, Clone)]
pub struct VarianceSumGame {
    sigma: DMatrix<f64>,
}

impl VarianceSumGame {
    pub fn new(sigma: DMatrix<f64>) -> Result<Self> {
        check_square_symmetric(&sigma)?;
        IndexSet::empty(sigma.nrows())?;
        Ok(Self { sigma })
    }
}

impl ValueFunction for VarianceSumGame {
    fn players(&self) -> usize {
        self.sigma.nrows()
    }

    fn value(&self, u: IndexSet) -> f64 {
        u.iter()
            .map(|i| u.iter().map(|j| self.sigma[(i, j)]).sum::<f64>())
            .sum()
    }
}
