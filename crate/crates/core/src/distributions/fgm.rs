//! Farlie–Gumbel–Morgenstern copula with uniform or unit-exponential margins.
//!
//! The copula density is `1 + θ(1−2s)(1−2t)` on the unit square. Given one
//! coordinate with margin value `s = F(x)`, the other has conditional CDF
//! `t + a(t − t²)` in `t = F(y)` with `a = θ(1 − 2s)`, which is inverted in
//! closed form.

use rand::Rng;

use crate::distributions::rng::stream_rng;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Margin {
    /// `U[0, 1]`.
    Uniform,
    /// Exponential with unit rate.
    Exponential,
}

impl Margin {
    pub fn cdf(self, x: f64) -> f64 {
        match self {
            Margin::Uniform => x.clamp(0.0, 1.0),
            Margin::Exponential => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x).exp_m1()
                }
            }
        }
    }

    pub fn quantile(self, t: f64) -> f64 {
        match self {
            Margin::Uniform => t,
            Margin::Exponential => -(-t).ln_1p(),
        }
    }

    pub fn mean(self) -> f64 {
        match self {
            Margin::Uniform => 0.5,
            Margin::Exponential => 1.0,
        }
    }

    pub fn variance(self) -> f64 {
        match self {
            Margin::Uniform => 1.0 / 12.0,
            Margin::Exponential => 1.0,
        }
    }

    pub fn in_support(self, x: f64) -> bool {
        match self {
            Margin::Uniform => (0.0..=1.0).contains(&x),
            Margin::Exponential => x >= 0.0 && x.is_finite(),
        }
    }

    /// Uniform draw on `[0, 1)` pushed through the quantile function.
    pub(crate) fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if !(theta.abs() <= 1.0) {
        return Err(Error::domain(format!("FGM parameter θ = {theta} outside [−1, 1]")));
    }
    Ok(())
}

/// Solves `t + a(t − t²) = v` for `t ∈ [0, 1]`, `|a| ≤ 1`, `v ∈ [0, 1)`.
///
/// Uses the rationalized root `2v / ((1+a) + √((1+a)² − 4av))`, which stays
/// accurate as `a → 0` where the textbook form cancels.
pub(crate) fn invert_conditional_cdf(a: f64, v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    let b = 1.0 + a;
    let disc = (b * b - 4.0 * a * v).max(0.0);
    let t = 2.0 * v / (b + disc.sqrt());
    t.clamp(0.0, 1.0 - f64::EPSILON / 2.0)
}

/// Draws the partner coordinate given one coordinate `x` (the copula is
/// exchangeable, so the same law applies in both directions).
pub fn fgm_conditional_sample<R: Rng + ?Sized>(theta: f64, margin: Margin, x: f64, rng: &mut R) -> f64 {
    let a = theta * (1.0 - 2.0 * margin.cdf(x));
    margin.quantile(invert_conditional_cdf(a, rng.random::<f64>()))
}

/// `n` draws of `(x₁, x₂)`; deterministic in `seed`.
pub fn fgm_sample(theta: f64, margin: Margin, n: usize, seed: u64) -> Result<Vec<[f64; 2]>> {
    check_theta(theta)?;
    let mut rng = stream_rng(seed, 0);
    Ok((0..n)
        .map(|_| {
            let x1 = margin.draw(&mut rng);
            let x2 = fgm_conditional_sample(theta, margin, x1, &mut rng);
            [x1, x2]
        })
        .collect())
}
