//! Shapley effects: variance-based importance of dependent random inputs.
//!
//! The crate is organised around the coalition game `val(u) = var(E(f(x) | x_u))`:
//!
//! * [`game`]: exact Shapley engines (subset weights and orderings) and axiom checks;
//! * [`anova`]: functional ANOVA for independent inputs on product grids;
//! * [`closed_forms`]: analytic effects for Gaussian linear, FGM, lognormal,
//!   three-point and R² games;
//! * [`maxexp`]: the expected-maximum game of exponential lifetimes;
//! * [`distributions`]: Gaussian conditionals, FGM sampling, finite joints, models;
//! * [`estimator`]: nested Monte Carlo with jackknife standard errors.
//!
//! Variables are indexed from zero throughout.

pub mod anova;
pub mod closed_forms;
pub mod distributions;
pub mod error;
pub mod estimator;
pub mod game;
pub mod index_set;
pub mod maxexp;

pub use error::{Error, Result};
pub use game::{shapley_exact, shapley_permutation, ShapleyResult, TableGame, ValueFunction};
pub use index_set::IndexSet;
