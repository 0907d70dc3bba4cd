//! Probability substrate: Gaussian conditionals, the FGM copula, finite-support
//! joints, and samplable models.

pub mod discrete;
pub mod fgm;
pub mod gaussian;
pub mod model;
pub mod rng;

pub use discrete::{bijection_transform, discrete_value_function, Atom, DiscreteGame, DiscreteJoint};
pub use fgm::{fgm_conditional_sample, fgm_sample, Margin};
pub use gaussian::{gaussian_condition, GaussianConditional, GaussianLinearGame, MultivariateGaussian};
pub use model::{ConditionalSampler, FgmModel, GaussianModel, IndependentModel, Model, Response};
pub use rng::{stream_rng, StreamRng};
