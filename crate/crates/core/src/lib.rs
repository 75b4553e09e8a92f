//! Dickey-Fuller unit root estimation.
//!
//! The crate implements four estimation pipelines for the Dickey-Fuller
//! test (one-step, two-step, residual-only and zero-padded), the Wald/LM
//! statistic algebra shared by all of them, a reproducible simulator for
//! the trend-plus-autoregression data generating process, and a parallel
//! Monte Carlo engine for critical values and size/power experiments.

// `!(x > tol)` is used deliberately so that NaN takes the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod deterministics;
pub mod error;
pub mod io;
mod linalg;
pub mod montecarlo;
pub mod regression;
pub mod simulation;
pub mod unitroot;

pub use deterministics::{build, lagged_expansion, CustomColumn, DetSpec};
pub use error::{Error, Result};
pub use regression::{ols_fit, prune_collinear, wald_single, DesignMatrix, OlsFit};
pub use simulation::{simulate, DgpConfig, Innovations, SeedSpec};
pub use unitroot::{
    lm_from_f, one_step_df, reparam_levels_to_adf, residual_only_df, two_step_df, zero_padded_df,
    Method, Statistic, TwoStepForm, UnitRootResult,
};
