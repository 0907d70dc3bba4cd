//! Samplable input models paired with a response function.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::distributions::fgm::{check_theta, fgm_conditional_sample, Margin};
use crate::distributions::gaussian::{GaussianConditional, MultivariateGaussian};
use crate::distributions::rng::StreamRng;
use crate::error::{Error, Result};
use crate::index_set::IndexSet;

/// Response `f(x)`.
#[derive(Clone)]
pub enum Response {
    /// `β₀ + βᵀx`
    Linear { beta0: f64, beta: Vec<f64> },
    /// `exp(β₀ + βᵀx)`
    ExpLinear { beta0: f64, beta: Vec<f64> },
    Custom(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl fmt::Debug for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Response::Linear { beta0, beta } => write!(f, "Linear({beta0}, {beta:?})"),
            Response::ExpLinear { beta0, beta } => write!(f, "ExpLinear({beta0}, {beta:?})"),
            Response::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Response {
    pub fn linear(beta: Vec<f64>) -> Self {
        Response::Linear { beta0: 0.0, beta }
    }

    pub fn exp_linear(beta: Vec<f64>) -> Self {
        Response::ExpLinear { beta0: 0.0, beta }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Response::Linear { beta0, beta } => beta0 + dot(beta, x),
            Response::ExpLinear { beta0, beta } => (beta0 + dot(beta, x)).exp(),
            Response::Custom(f) => f(x),
        }
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        match self {
            Response::Linear { beta, .. } | Response::ExpLinear { beta, .. } if beta.len() != d => {
                Err(Error::dimension(format!("β has {} entries, d = {d}", beta.len())))
            }
            _ => Ok(()),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Draws the free coordinates of `x` given the coordinates already filled in.
pub trait ConditionalSampler: Sync {
    fn fill(&self, x: &mut [f64], rng: &mut StreamRng);
}

/// Joint input law plus response. Implementations must be deterministic given
/// the RNG state.
pub trait Model: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> f64;

    /// Fills `x` with a draw from the joint law.
    fn sample(&self, rng: &mut StreamRng, x: &mut [f64]);

    /// Sampler for `x_{−u}` given `x_u`.
    fn conditional(&self, given: IndexSet) -> Result<Box<dyn ConditionalSampler + '_>> {
        Err(Error::MissingSampler(format!("no conditional sampler for u = {given}")))
    }
}

/// `x ~ N(μ, Σ)`.
#[derive(Debug, Clone)]
pub struct GaussianModel {
    law: MultivariateGaussian,
    response: Response,
}

impl GaussianModel {
    pub fn new(mu: Vec<f64>, sigma: DMatrix<f64>, response: Response) -> Result<Self> {
        let law = MultivariateGaussian::new(DVector::from_vec(mu), sigma)?;
        response.check_dim(law.dim())?;
        Ok(Self { law, response })
    }

    /// Standard bivariate normal with correlation `rho`.
    pub fn bivariate(rho: f64, response: Response) -> Result<Self> {
        Self::new(
            vec![0.0, 0.0],
            DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]),
            response,
        )
    }
}

struct GaussianSampler {
    cond: GaussianConditional,
    lower: DMatrix<f64>,
}

impl ConditionalSampler for GaussianSampler {
    fn fill(&self, x: &mut [f64], rng: &mut StreamRng) {
        let given: Vec<f64> = self.cond.given_indices().iter().map(|&j| x[j]).collect();
        let mean = self.cond.mean(&given).expect("sizes match by construction");
        let z = DVector::from_fn(mean.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
        let draw = mean + &self.lower * z;
        for (k, &j) in self.cond.rest_indices().iter().enumerate() {
            x[j] = draw[k];
        }
    }
}

impl Model for GaussianModel {
    fn dim(&self) -> usize {
        self.law.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.response.eval(x)
    }

    fn sample(&self, rng: &mut StreamRng, x: &mut [f64]) {
        self.law.sample(rng, x);
    }

    fn conditional(&self, given: IndexSet) -> Result<Box<dyn ConditionalSampler + '_>> {
        let cond = self.law.condition(given)?;
        let lower = if cond.covariance().nrows() == 0 {
            DMatrix::zeros(0, 0)
        } else {
            cond.covariance()
                .clone()
                .cholesky()
                .ok_or_else(|| Error::Singular(format!("conditional covariance given {given}")))?
                .l()
        };
        Ok(Box::new(GaussianSampler { cond, lower }))
    }
}

/// Bivariate FGM copula with a common margin.
#[derive(Debug, Clone)]
pub struct FgmModel {
    theta: f64,
    margin: Margin,
    response: Response,
}

impl FgmModel {
    pub fn new(theta: f64, margin: Margin, response: Response) -> Result<Self> {
        check_theta(theta)?;
        response.check_dim(2)?;
        Ok(Self {
            theta,
            margin,
            response,
        })
    }
}

struct FgmSampler<'a> {
    model: &'a FgmModel,
    given: u32,
}

impl ConditionalSampler for FgmSampler<'_> {
    fn fill(&self, x: &mut [f64], rng: &mut StreamRng) {
        let m = self.model;
        match self.given {
            0b00 => m.sample(rng, x),
            0b01 => x[1] = fgm_conditional_sample(m.theta, m.margin, x[0], rng),
            0b10 => x[0] = fgm_conditional_sample(m.theta, m.margin, x[1], rng),
            _ => {}
        }
    }
}

impl Model for FgmModel {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.response.eval(x)
    }

    fn sample(&self, rng: &mut StreamRng, x: &mut [f64]) {
        x[0] = self.margin.draw(rng);
        x[1] = fgm_conditional_sample(self.theta, self.margin, x[0], rng);
    }

    fn conditional(&self, given: IndexSet) -> Result<Box<dyn ConditionalSampler + '_>> {
        if given.players() != 2 {
            return Err(Error::dimension("FGM model has two inputs"));
        }
        Ok(Box::new(FgmSampler {
            model: self,
            given: given.mask(),
        }))
    }
}

/// Independent inputs with the given margins.
#[derive(Debug, Clone)]
pub struct IndependentModel {
    margins: Vec<Margin>,
    response: Response,
}

impl IndependentModel {
    pub fn new(margins: Vec<Margin>, response: Response) -> Result<Self> {
        IndexSet::empty(margins.len())?;
        response.check_dim(margins.len())?;
        Ok(Self { margins, response })
    }
}

struct IndependentSampler<'a> {
    margins: &'a [Margin],
    given: IndexSet,
}

impl ConditionalSampler for IndependentSampler<'_> {
    fn fill(&self, x: &mut [f64], rng: &mut StreamRng) {
        for j in self.given.complement().iter() {
            x[j] = self.margins[j].draw(rng);
        }
    }
}

impl Model for IndependentModel {
    fn dim(&self) -> usize {
        self.margins.len()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.response.eval(x)
    }

    fn sample(&self, rng: &mut StreamRng, x: &mut [f64]) {
        for (xj, m) in x.iter_mut().zip(&self.margins) {
            *xj = m.draw(rng);
        }
    }

    fn conditional(&self, given: IndexSet) -> Result<Box<dyn ConditionalSampler + '_>> {
        if given.players() != self.dim() {
            return Err(Error::dimension("conditioning set over the wrong number of inputs"));
        }
        Ok(Box::new(IndependentSampler {
            margins: &self.margins,
            given,
        }))
    }
}
