//! Two-input closed forms. With `d = 2` the Shapley value only needs
//! `σ²`, `var(E(Y|x₁))` and `var(E(Y|x₂))`.

use crate::distributions::fgm::{check_theta, Margin};
use crate::error::{Error, Result};

/// Two-input attribution `(φ₁, φ₂)` with `φ₁ + φ₂ = σ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateShapley {
    pub phi1: f64,
    pub phi2: f64,
    pub sigma2: f64,
}

impl BivariateShapley {
    /// From the relative importance `φ₁/σ²`; `φ₂` takes the remainder.
    pub fn from_share(share1: f64, sigma2: f64) -> Self {
        let phi1 = share1 * sigma2;
        Self {
            phi1,
            phi2: sigma2 - phi1,
            sigma2,
        }
    }

    pub fn share1(&self) -> f64 {
        self.phi1 / self.sigma2
    }

    pub fn share2(&self) -> f64 {
        self.phi2 / self.sigma2
    }

    pub fn phi(&self) -> [f64; 2] {
        [self.phi1, self.phi2]
    }
}

/// Shapley values for two inputs from `σ²` and the two closed indices
/// `vceⱼ = var(E(Y | xⱼ))`.
pub fn bivariate_shapley(sigma2: f64, vce1: f64, vce2: f64) -> Result<BivariateShapley> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::domain(format!("σ² = {sigma2} must be positive")));
    }
    let slack = 1e-12 * sigma2;
    for (j, v) in [(1, vce1), (2, vce2)] {
        if !(v >= -slack && v <= sigma2 + slack) {
            return Err(Error::domain(format!("var(E(Y|x{j})) = {v} outside [0, σ² = {sigma2}]")));
        }
    }
    let phi1 = 0.5 * (sigma2 + vce1 - vce2);
    Ok(BivariateShapley {
        phi1,
        phi2: sigma2 - phi1,
        sigma2,
    })
}

/// `φ₁/φ₂` written with expected conditional variances:
/// `(vce₁ + ecv₂) / (vce₂ + ecv₁)` where `ecvⱼ = σ² − vceⱼ`.
pub fn bivariate_ratio(sigma2: f64, vce1: f64, vce2: f64) -> f64 {
    let (ecv1, ecv2) = (sigma2 - vce1, sigma2 - vce2);
    (vce1 + ecv2) / (vce2 + ecv1)
}

/// `f(x) = β₁x₁ + β₂x₂` with `(x₁, x₂)` FGM-coupled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgmProblem {
    pub theta: f64,
    pub beta: [f64; 2],
    pub margin: Margin,
}

impl FgmProblem {
    pub fn new(theta: f64, beta: [f64; 2], margin: Margin) -> Result<Self> {
        check_theta(theta)?;
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::domain("β must be finite"));
        }
        Ok(Self { theta, beta, margin })
    }
}

fn require_margin(p: &FgmProblem, margin: Margin) -> Result<()> {
    check_theta(p.theta)?;
    if p.margin != margin {
        return Err(Error::domain(format!(
            "expected {margin:?} margins, problem has {:?}",
            p.margin
        )));
    }
    Ok(())
}

fn positive_variance(sigma2: f64) -> Result<f64> {
    if sigma2 > 0.0 && sigma2.is_finite() {
        Ok(sigma2)
    } else {
        Err(Error::domain(format!("zero variance (σ² = {sigma2})")))
    }
}

/// Uniform margins:
/// `φ₁/σ² = ½(1 + (1 − θ²/9)(β₁² − β₂²)/(12σ²))`, `σ² = (β₁² + β₂²)/12 + β₁β₂θ/18`.
pub fn fgm_uniform_shapley(p: &FgmProblem) -> Result<BivariateShapley> {
    require_margin(p, Margin::Uniform)?;
    let ([b1, b2], t) = (p.beta, p.theta);
    let sigma2 = positive_variance((b1 * b1 + b2 * b2) / 12.0 + b1 * b2 * t / 18.0)?;
    let share1 = 0.5 * (1.0 + (1.0 - t * t / 9.0) * (b1 * b1 - b2 * b2) / (12.0 * sigma2));
    Ok(BivariateShapley::from_share(share1, sigma2))
}

/// Unit-exponential margins:
/// `φ₁/σ² = ½(1 + (1 − θ²/12)(β₁² − β₂²)/σ²)`, `σ² = β₁² + β₂² + θβ₁β₂/2`.
pub fn fgm_exponential_shapley(p: &FgmProblem) -> Result<BivariateShapley> {
    require_margin(p, Margin::Exponential)?;
    let ([b1, b2], t) = (p.beta, p.theta);
    let sigma2 = positive_variance(b1 * b1 + b2 * b2 + t * b1 * b2 / 2.0)?;
    let share1 = 0.5 * (1.0 + (1.0 - t * t / 12.0) * (b1 * b1 - b2 * b2) / sigma2);
    Ok(BivariateShapley::from_share(share1, sigma2))
}

/// `E(x₂ | x₁)` under the FGM copula; linear in `x₁` for uniform margins.
pub fn fgm_conditional_mean(margin: Margin, theta: f64, x1: f64) -> Result<f64> {
    check_theta(theta)?;
    if !margin.in_support(x1) {
        return Err(Error::domain(format!("x₁ = {x1} outside the {margin:?} support")));
    }
    Ok(match margin {
        Margin::Uniform => theta / 3.0 * x1 + (0.5 - theta / 6.0),
        Margin::Exponential => 1.0 + theta / 2.0 - theta * (-x1).exp(),
    })
}

/// `f(x) = exp(β₁x₁ + β₂x₂)` with standard bivariate normal inputs of correlation `ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalBivariateProblem {
    pub beta: [f64; 2],
    pub rho: f64,
}

/// Largest `β₁² + β₂² + 2|ρβ₁β₂|` accepted before `exp` overflows.
pub const LOGNORMAL_EXPONENT_CAP: f64 = 700.0;

impl LognormalBivariateProblem {
    pub fn new(beta: [f64; 2], rho: f64) -> Result<Self> {
        if !(rho.abs() <= 1.0) {
            return Err(Error::domain(format!("correlation ρ = {rho} outside [−1, 1]")));
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::domain("β must be finite"));
        }
        let [b1, b2] = beta;
        let bound = b1 * b1 + b2 * b2 + 2.0 * (rho * b1 * b2).abs();
        if bound > LOGNORMAL_EXPONENT_CAP {
            return Err(Error::domain(format!(
                "β₁² + β₂² + 2|ρβ₁β₂| = {bound} exceeds {LOGNORMAL_EXPONENT_CAP} (exp overflow)"
            )));
        }
        Ok(Self { beta, rho })
    }

    /// `βᵀΣβ`, the variance of the exponent.
    pub fn exponent_variance(&self) -> f64 {
        let [b1, b2] = self.beta;
        b1 * b1 + b2 * b2 + 2.0 * self.rho * b1 * b2
    }
}

/// `φ₁/σ² = ½(1 + (e^{(β₁+β₂ρ)²} − e^{(β₂+β₁ρ)²}) / (e^{q} − 1))` with
/// `q = β₁² + β₂² + 2ρβ₁β₂` and `σ² = e^{q}(e^{q} − 1)`.
///
/// Evaluated after dividing through by `e^{q}`: `(β₁+β₂ρ)² − q = −β₂²(1−ρ²)`,
/// which keeps every exponential in `(0, 1]`.
pub fn lognormal_bivariate_shapley(p: &LognormalBivariateProblem) -> Result<BivariateShapley> {
    let p = LognormalBivariateProblem::new(p.beta, p.rho)?;
    let [b1, b2] = p.beta;
    let q = p.exponent_variance();
    let sigma2 = positive_variance(q.exp() * q.exp_m1())?;
    let s = 1.0 - p.rho * p.rho;
    let num = (-b2 * b2 * s).exp() - (-b1 * b1 * s).exp();
    let den = -(-q).exp_m1();
    let share1 = 0.5 * (1.0 + num / den);
    Ok(BivariateShapley::from_share(share1, sigma2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bivariate_forms() {
        let r = bivariate_shapley(2.0, 1.0, 1.0).unwrap();
        assert_eq!(r.phi(), [1.0, 1.0]);
        let r = bivariate_shapley(3.0, 3.0, 0.0).unwrap();
        assert_eq!(r.phi(), [3.0, 0.0]);
        let rho: f64 = 0.4;
        let r = bivariate_shapley(1.0, 1.0, rho * rho).unwrap();
        assert!((r.phi2 - rho * rho / 2.0).abs() < 1e-15);

        let (s2, v1, v2) = (5.0, 3.2, 1.1);
        let r = bivariate_shapley(s2, v1, v2).unwrap();
        let (e1, e2) = (s2 - v1, s2 - v2);
        let via_ecv = 0.5 * (1.0 + (e2 - e1) / s2);
        assert!((r.share1() - via_ecv).abs() < 1e-12);
        assert!((r.phi1 / r.phi2 - bivariate_ratio(s2, v1, v2)).abs() < 1e-12);

        assert!(bivariate_shapley(0.0, 0.0, 0.0).is_err());
        assert!(bivariate_shapley(1.0, 1.5, 0.0).is_err());
        assert!(bivariate_shapley(1.0, -0.1, 0.0).is_err());
    }

    #[test]
    fn fgm_uniform_cases() {
        let r = fgm_uniform_shapley(&FgmProblem::new(0.0, [2.0, 1.0], Margin::Uniform).unwrap()).unwrap();
        assert!((r.share1() - 4.0 / 5.0).abs() < 1e-15);
        for t in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            let r = fgm_uniform_shapley(&FgmProblem::new(t, [1.5, 1.5], Margin::Uniform).unwrap()).unwrap();
            assert_eq!(r.share1(), 0.5);
        }
        // Agrees with the generic two-input form fed with var(E(f|xⱼ)).
        let (t, b1, b2) = (0.6, 2.0, -0.5);
        let r = fgm_uniform_shapley(&FgmProblem::new(t, [b1, b2], Margin::Uniform).unwrap()).unwrap();
        let vce1 = (b1 + t * b2 / 3.0).powi(2) / 12.0;
        let vce2 = (b2 + t * b1 / 3.0).powi(2) / 12.0;
        let g = bivariate_shapley(r.sigma2, vce1, vce2).unwrap();
        assert!((g.phi1 - r.phi1).abs() < 1e-14);
        assert!(fgm_uniform_shapley(&FgmProblem::new(0.5, [1.0, 1.0], Margin::Exponential).unwrap()).is_err());
        assert!(fgm_uniform_shapley(&FgmProblem::new(0.5, [0.0, 0.0], Margin::Uniform).unwrap()).is_err());
    }

    #[test]
    fn fgm_exponential_cases() {
        for t in [-1.0, 0.0, 1.0] {
            let r = fgm_exponential_shapley(&FgmProblem::new(t, [2.0, 2.0], Margin::Exponential).unwrap()).unwrap();
            assert_eq!(r.share1(), 0.5);
        }
        let shares: Vec<f64> = (0..=20)
            .map(|k| {
                let p = FgmProblem::new(k as f64 / 20.0, [2.0, 1.0], Margin::Exponential).unwrap();
                fgm_exponential_shapley(&p).unwrap().share1()
            })
            .collect();
        assert!(shares.windows(2).all(|w| w[1] < w[0]));
        assert!(shares.iter().all(|&s| s > 0.5));
        // generic form with var(E(f|x₁)) = β₁² + β₂²θ²/12 + β₁β₂θ/2
        let (t, b1, b2) = (0.8, 2.0, 1.0);
        let r = fgm_exponential_shapley(&FgmProblem::new(t, [b1, b2], Margin::Exponential).unwrap()).unwrap();
        let vce = |a: f64, b: f64| a * a + b * b * t * t / 12.0 + a * b * t / 2.0;
        let g = bivariate_shapley(r.sigma2, vce(b1, b2), vce(b2, b1)).unwrap();
        assert!((g.phi1 - r.phi1).abs() < 1e-13);
    }

    #[test]
    fn conditional_means() {
        assert_eq!(fgm_conditional_mean(Margin::Uniform, 0.0, 0.3).unwrap(), 0.5);
        assert_eq!(fgm_conditional_mean(Margin::Exponential, 0.0, 2.0).unwrap(), 1.0);
        assert!((fgm_conditional_mean(Margin::Uniform, 1.0, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(fgm_conditional_mean(Margin::Uniform, 0.5, 1.5).is_err());
        assert!(fgm_conditional_mean(Margin::Exponential, 0.5, -0.1).is_err());
        assert!(fgm_conditional_mean(Margin::Uniform, 1.1, 0.5).is_err());
    }

    fn direct_form(b1: f64, b2: f64, rho: f64) -> f64 {
        let q = b1 * b1 + b2 * b2 + 2.0 * rho * b1 * b2;
        0.5 * (1.0 + ((b1 + b2 * rho).powi(2).exp() - (b2 + b1 * rho).powi(2).exp()) / (q.exp() - 1.0))
    }

    #[test]
    fn lognormal_stable_form_matches_direct_form() {
        for &(b1, b2) in &[(2.0, 1.0), (1.0, 3.0), (0.5, -0.7)] {
            for k in -9..=9 {
                let rho = k as f64 / 10.0;
                let p = LognormalBivariateProblem::new([b1, b2], rho).unwrap();
                let r = lognormal_bivariate_shapley(&p).unwrap();
                assert!((r.share1() - direct_form(b1, b2, rho)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lognormal_cases() {
        for rho in [-1.0, 1.0] {
            let r = lognormal_bivariate_shapley(&LognormalBivariateProblem::new([3.0, 1.0], rho).unwrap()).unwrap();
            assert_eq!(r.share1(), 0.5);
        }
        let r = lognormal_bivariate_shapley(&LognormalBivariateProblem::new([1.0, 1.0], 0.0).unwrap()).unwrap();
        assert_eq!(r.share1(), 0.5);
        // Reflecting x₂ flips both ρ and β₂ and must leave the shares unchanged.
        for k in 1..10 {
            let rho = k as f64 / 10.0;
            let a = lognormal_bivariate_shapley(&LognormalBivariateProblem::new([2.0, 1.0], rho).unwrap()).unwrap();
            let b = lognormal_bivariate_shapley(&LognormalBivariateProblem::new([2.0, -1.0], -rho).unwrap()).unwrap();
            assert!((a.share1() - b.share1()).abs() < 1e-12);
        }
        assert!(LognormalBivariateProblem::new([20.0, 20.0], 0.5).is_err());
        assert!(LognormalBivariateProblem::new([1.0, 1.0], 1.01).is_err());
        assert!(lognormal_bivariate_shapley(&LognormalBivariateProblem { beta: [1.0, 1.0], rho: -1.0 }).is_err());
    }
}
