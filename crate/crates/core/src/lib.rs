//! Model selection for high-dimensional ARX regressions whose dependent
//! series carries unknown (possibly complex) unit roots.
//!
//! The selector ([`fhtd::fhtd_select`]) coerces all candidate AR lags into the
//! regression, screens exogenous lags with forward stepwise regression, stops
//! with a high-dimensional information criterion, trims by leave-one-out
//! comparisons and thresholds the AR coefficients. Baseline selectors, the
//! simulation designs, evaluation metrics and an experiment harness sit around
//! it.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below name the double-precision instantiations used by the harness.

pub mod baselines;
pub mod eval;
pub mod fhtd;
pub mod harness;
pub mod linalg;
pub mod projection;
pub mod scalar;
pub mod tsdgp;
pub mod types;

pub use scalar::Real;
pub use types::{ExoIndex, Regressor};

pub type Dataset64 = tsdgp::Dataset<f64>;
pub type Dataset32 = tsdgp::Dataset<f32>;
pub type LagDesign64 = projection::LagDesign<f64>;
pub type SelectedModel64 = fhtd::SelectedModel<f64>;
pub type SelectedModel32 = fhtd::SelectedModel<f32>;
pub type FhtdConfig64 = fhtd::FhtdConfig<f64>;
pub type SelectionPath64 = fhtd::SelectionPath<f64>;
pub type LassoFit64 = baselines::LassoFit<f64>;
