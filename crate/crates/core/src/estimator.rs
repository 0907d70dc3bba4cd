//! Nested Monte Carlo estimation of Shapley effects.
//!
//! Every coalition value is estimated from its own RNG stream, keyed by
//! `(seed, form, mask)`, and the exact Shapley weights are applied to the
//! estimated table. Standard errors come from a leave-one-out jackknife over
//! outer replicates: replicate `i` of every coalition is dropped together.
//!
//! Two value functions give the same Shapley values:
//!
//! * [`ValueForm::Vce`]: `val(u) = var(E(f | x_u))`, estimated from the
//!   variance of inner means with the usual `E(var_inner)/n_inner` correction;
//! * [`ValueForm::Ecv`]: `val(u) = E(var(f | x_{−u}))`, estimated by averaging
//!   inner variances, which is unbiased as is.
//!
//! Both share one estimate of `σ²` for the grand coalition, so `Σ φ̂ⱼ = σ̂²`
//! holds exactly in either form.

use rayon::prelude::*;

use crate::distributions::model::Model;
use crate::distributions::rng::{stream_rng, StreamRng};
use crate::error::{Error, Result};
use crate::game::shapley_from_table;
use crate::index_set::{check_players, full_mask, IndexSet};

/// Player cap for the estimator (every one of the `2^d` coalitions is sampled).
pub const MC_MAX_PLAYERS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueForm {
    /// Variance of the conditional expectation given `x_u`.
    Vce,
    /// Expected conditional variance given `x_{−u}`.
    Ecv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_outer: usize,
    pub n_inner: usize,
    pub seed: u64,
    pub value_form: ValueForm,
}

impl McConfig {
    pub fn new(n_outer: usize, n_inner: usize, seed: u64, value_form: ValueForm) -> Result<Self> {
        let cfg = Self {
            n_outer,
            n_inner,
            seed,
            value_form,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_outer < 2 || self.n_inner < 2 {
            return Err(Error::domain(format!(
                "n_outer = {} and n_inner = {} must both be at least 2",
                self.n_outer, self.n_inner
            )));
        }
        Ok(())
    }

    pub fn with_form(self, value_form: ValueForm) -> Self {
        Self { value_form, ..self }
    }
}

/// A single coalition value estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ValEstimate {
    pub estimate: f64,
    /// Jackknife standard error (zero when nothing was sampled).
    pub se: f64,
    /// Leave-one-outer-replicate-out estimates; empty when nothing was sampled.
    pub leave_one_out: Vec<f64>,
}

impl ValEstimate {
    fn exact_zero() -> Self {
        Self {
            estimate: 0.0,
            se: 0.0,
            leave_one_out: Vec::new(),
        }
    }

    fn from_jackknife(estimate: f64, leave_one_out: Vec<f64>) -> Self {
        let se = jackknife_se(&leave_one_out);
        Self {
            estimate,
            se,
            leave_one_out,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McShapleyResult {
    pub phi_hat: Vec<f64>,
    pub se: Vec<f64>,
    pub sigma2_hat: f64,
    /// Estimated coalition values, indexed by mask.
    pub val_hat: Vec<f64>,
    pub value_form: ValueForm,
    /// Variables with `φ̂ⱼ < −3·seⱼ`; estimates are never clamped.
    pub anomalies: Vec<usize>,
}

/// Jackknife standard error from leave-one-out estimates.
pub fn jackknife_se(loo: &[f64]) -> f64 {
    let n = loo.len();
    if n < 2 {
        return 0.0;
    }
    let mean = loo.iter().sum::<f64>() / n as f64;
    let ss: f64 = loo.iter().map(|v| (v - mean).powi(2)).sum();
    ((n - 1) as f64 / n as f64 * ss).sqrt()
}

const POOL_TAG: u64 = 3;

fn stream_id(form: ValueForm, mask: u32) -> u64 {
    let tag = match form {
        ValueForm::Vce => 1,
        ValueForm::Ecv => 2,
    };
    (tag << 32) | mask as u64
}

/// Sample mean and unbiased variance of `xs`, computed about `xs[0]`.
fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let c = xs[0];
    let (s1, s2) = xs.iter().fold((0.0, 0.0), |(a, b), &x| (a + (x - c), b + (x - c) * (x - c)));
    let mean_dev = s1 / n;
    (c + mean_dev, (s2 - s1 * mean_dev) / (n - 1.0))
}

/// Shifted first and second moment sums, used for leave-one-out variances.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    s1: f64,
    s2: f64,
}

impl Moments {
    fn push(&mut self, x: f64, shift: f64) {
        let d = x - shift;
        self.n += 1.0;
        self.s1 += d;
        self.s2 += d * d;
    }

    fn minus(self, other: Moments) -> Moments {
        Moments {
            n: self.n - other.n,
            s1: self.s1 - other.s1,
            s2: self.s2 - other.s2,
        }
    }

    fn plus(self, other: Moments) -> Moments {
        Moments {
            n: self.n + other.n,
            s1: self.s1 + other.s1,
            s2: self.s2 + other.s2,
        }
    }

    fn unbiased_variance(self) -> f64 {
        (self.s2 - self.s1 * self.s1 / self.n) / (self.n - 1.0)
    }
}

/// `σ̂²`: plain sample variance of `n_outer · n_inner` joint draws, arranged in
/// `n_outer` blocks for the jackknife.
fn estimate_total<M: Model + ?Sized>(model: &M, cfg: &McConfig) -> ValEstimate {
    let d = model.dim();
    let mut rng = stream_rng(cfg.seed, POOL_TAG << 32);
    let mut x = vec![0.0; d];
    let mut blocks = Vec::with_capacity(cfg.n_outer);
    let mut shift = None;
    for _ in 0..cfg.n_outer {
        let mut b = Moments::default();
        for _ in 0..cfg.n_inner {
            model.sample(&mut rng, &mut x);
            let y = model.eval(&x);
            let c = *shift.get_or_insert(y);
            b.push(y, c);
        }
        blocks.push(b);
    }
    let all = blocks.iter().fold(Moments::default(), |a, &b| a.plus(b));
    let loo = blocks.iter().map(|&b| all.minus(b).unbiased_variance()).collect();
    ValEstimate::from_jackknife(all.unbiased_variance(), loo)
}

fn estimate_vce<M: Model + ?Sized>(model: &M, u: IndexSet, cfg: &McConfig) -> Result<ValEstimate> {
    let sampler = model.conditional(u)?;
    let d = model.dim();
    let mut rng: StreamRng = stream_rng(cfg.seed, stream_id(ValueForm::Vce, u.mask()));
    let mut x = vec![0.0; d];
    let mut ys = vec![0.0; cfg.n_inner];
    let mut means = Vec::with_capacity(cfg.n_outer);
    let mut inner_vars = Vec::with_capacity(cfg.n_outer);
    for _ in 0..cfg.n_outer {
        model.sample(&mut rng, &mut x);
        for y in ys.iter_mut() {
            sampler.fill(&mut x, &mut rng);
            *y = model.eval(&x);
        }
        let (m, v) = mean_var(&ys);
        means.push(m);
        inner_vars.push(v);
    }
    let n_in = cfg.n_inner as f64;
    let shift = means[0];
    let mut all = Moments::default();
    for &m in &means {
        all.push(m, shift);
    }
    let var_total: f64 = inner_vars.iter().sum();
    let n = cfg.n_outer as f64;
    let estimate = all.unbiased_variance() - var_total / n / n_in;
    let loo = means
        .iter()
        .zip(&inner_vars)
        .map(|(&m, &v)| {
            let mut one = Moments::default();
            one.push(m, shift);
            all.minus(one).unbiased_variance() - (var_total - v) / (n - 1.0) / n_in
        })
        .collect();
    Ok(ValEstimate::from_jackknife(estimate, loo))
}

fn estimate_ecv<M: Model + ?Sized>(model: &M, u: IndexSet, cfg: &McConfig) -> Result<ValEstimate> {
    let sampler = model.conditional(u.complement())?;
    let d = model.dim();
    let mut rng: StreamRng = stream_rng(cfg.seed, stream_id(ValueForm::Ecv, u.mask()));
    let mut x = vec![0.0; d];
    let mut ys = vec![0.0; cfg.n_inner];
    let mut inner_vars = Vec::with_capacity(cfg.n_outer);
    for _ in 0..cfg.n_outer {
        model.sample(&mut rng, &mut x);
        for y in ys.iter_mut() {
            sampler.fill(&mut x, &mut rng);
            *y = model.eval(&x);
        }
        inner_vars.push(mean_var(&ys).1);
    }
    let n = cfg.n_outer as f64;
    let total: f64 = inner_vars.iter().sum();
    let loo = inner_vars.iter().map(|v| (total - v) / (n - 1.0)).collect();
    Ok(ValEstimate::from_jackknife(total / n, loo))
}

/// Estimates one coalition value in the configured form.
///
/// `u = ∅` returns exactly 0 without sampling; the grand coalition returns the
/// plain sample variance of `f`.
pub fn estimate_val<M: Model + ?Sized>(model: &M, u: IndexSet, cfg: &McConfig) -> Result<ValEstimate> {
    cfg.validate()?;
    if u.players() != model.dim() {
        return Err(Error::dimension(format!(
            "set over {} players, model has {} inputs",
            u.players(),
            model.dim()
        )));
    }
    if u.is_empty() {
        return Ok(ValEstimate::exact_zero());
    }
    if u.is_full() {
        return Ok(estimate_total(model, cfg));
    }
    match cfg.value_form {
        ValueForm::Vce => estimate_vce(model, u, cfg),
        ValueForm::Ecv => estimate_ecv(model, u, cfg),
    }
}

/// Monte Carlo Shapley effects with jackknife standard errors.
pub fn estimate_shapley<M: Model + ?Sized>(model: &M, cfg: &McConfig) -> Result<McShapleyResult> {
    cfg.validate()?;
    let d = model.dim();
    check_players(d)?;
    if d > MC_MAX_PLAYERS {
        return Err(Error::capacity(
            "Monte Carlo Shapley",
            d,
            MC_MAX_PLAYERS,
            format!("2^{d} coalition estimates"),
        ));
    }
    let n_sets = 1u32 << d;
    let estimates: Vec<ValEstimate> = (0..n_sets)
        .into_par_iter()
        .map(|m| estimate_val(model, IndexSet::from_mask_unchecked(d, m), cfg))
        .collect::<Result<_>>()?;

    let val_hat: Vec<f64> = estimates.iter().map(|e| e.estimate).collect();
    let phi_hat = shapley_from_table(d, &val_hat)?;

    let n = cfg.n_outer;
    let loo_phi: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let table: Vec<f64> = estimates
                .iter()
                .map(|e| e.leave_one_out.get(i).copied().unwrap_or(e.estimate))
                .collect();
            shapley_from_table(d, &table)
        })
        .collect::<Result<_>>()?;
    let se: Vec<f64> = (0..d)
        .map(|j| {
            let col: Vec<f64> = loo_phi.iter().map(|p| p[j]).collect();
            jackknife_se(&col)
        })
        .collect();

    let anomalies = (0..d).filter(|&j| phi_hat[j] < -3.0 * se[j]).collect();
    Ok(McShapleyResult {
        phi_hat,
        se,
        sigma2_hat: val_hat[full_mask(d) as usize],
        val_hat,
        value_form: cfg.value_form,
        anomalies,
    })
}
