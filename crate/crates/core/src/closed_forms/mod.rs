//! Analytic Shapley effects for the worked distribution families.

pub mod bivariate;
pub mod gaussian;
pub mod lmg;
pub mod three_point;

pub use bivariate::{
    bivariate_ratio, bivariate_shapley, fgm_conditional_mean, fgm_exponential_shapley, fgm_uniform_shapley,
    lognormal_bivariate_shapley, BivariateShapley, FgmProblem, LognormalBivariateProblem,
};
pub use gaussian::{gaussian_linear_shapley, variance_game_shapley, GaussianLinearProblem, VarianceSumGame};
pub use lmg::{covariance_from_data, lmg_shares, r_squared};
pub use three_point::{three_point_shapley, ThreePointProblem};
