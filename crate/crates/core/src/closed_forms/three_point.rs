use crate::closed_forms::bivariate::BivariateShapley;
use crate::distributions::discrete::{Atom, DiscreteJoint};
use crate::error::{Error, Result};

/// Two binary inputs that are never both 1: `x = (0,0), (1,0), (0,1)` with
/// probabilities `p₀, p₁, p₂` and outputs `y₀, y₁, y₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreePointProblem {
    pub p: [f64; 3],
    pub y: [f64; 3],
}

impl ThreePointProblem {
    pub fn new(p: [f64; 3], y: [f64; 3]) -> Result<Self> {
        if p.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::domain("non-finite three-point parameters"));
        }
        if p[0] < 0.0 || !(p[1] > 0.0) || !(p[2] > 0.0) {
            return Err(Error::domain(format!(
                "need p₀ ≥ 0 and p₁, p₂ > 0; got {p:?}"
            )));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
        }
        let problem = Self { p, y };
        if !(problem.variance() > 0.0) {
            return Err(Error::domain("zero variance: y is constant on the support"));
        }
        Ok(problem)
    }

    /// `(ȳ₁, ȳ₂) = (y₁ − y₀, y₂ − y₀)`.
    fn offsets(&self) -> (f64, f64) {
        (self.y[1] - self.y[0], self.y[2] - self.y[0])
    }

    /// `var(y)`, computed with `y₀` shifted to zero.
    pub fn variance(&self) -> f64 {
        let (y1, y2) = self.offsets();
        let [_, p1, p2] = self.p;
        let mu = p1 * y1 + p2 * y2;
        p1 * y1 * y1 + p2 * y2 * y2 - mu * mu
    }

    /// The table as a finite joint (zero-probability points dropped).
    pub fn to_joint(&self) -> Result<DiscreteJoint> {
        let points = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let atoms = points
            .iter()
            .zip(self.p.iter().zip(&self.y))
            .filter(|(_, (&p, _))| p > 0.0)
            .map(|(x, (&p, &y))| Atom { x: x.to_vec(), p, y })
            .collect();
        DiscreteJoint::new(atoms)
    }
}

/// `φ₁/σ² = ½(1 + (p₀/σ²)(p₁(1−p₁)ȳ₁² − p₂(1−p₂)ȳ₂²)/((1−p₁)(1−p₂)))`.
pub fn three_point_shapley(p: &ThreePointProblem) -> Result<BivariateShapley> {
    let p = ThreePointProblem::new(p.p, p.y)?;
    let sigma2 = p.variance();
    let [p0, p1, p2] = p.p;
    let (y1, y2) = p.offsets();
    let share1 = 0.5
        * (1.0 + p0 / sigma2 * (p1 * (1.0 - p1) * y1 * y1 - p2 * (1.0 - p2) * y2 * y2) / ((1.0 - p1) * (1.0 - p2)));
    Ok(BivariateShapley::from_share(share1, sigma2))
}
