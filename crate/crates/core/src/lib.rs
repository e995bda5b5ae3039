//! Residual-based homoscedasticity test for fixed-design linear regression
//! that stays calibrated when the number of covariates grows with the
//! sample size.
//!
//! The statistic is the squared coefficient of variation of the squared OLS
//! residuals,
//!
//! ```text
//! T = Σ (ε̂ᵢ² − m)² / (n⁻¹ (Σ ε̂ᵢ²)²),   m = n⁻¹ Σ ε̂ᵢ²,
//! ```
//!
//! standardized by a null mean and variance that are exact functions of the
//! residual-maker `P = I − X(X′X)⁻¹X′` and the first few cumulants of the
//! error law. Everything in this crate is pure computation and builds without
//! `std` (an allocator is required). IO, simulation and the command line live
//! in the companion `fcvt` crate.
#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod functionals;
pub mod hetero;
pub mod linalg;
pub mod moments;
pub mod oracle;
pub mod regression;

pub use error::{Error, Result};
pub use functionals::{
    general_functionals, projection_functionals, projection_functionals_quadratic,
    CubicFunctionals, GeneralSummary, ProjectionSummary,
};
pub use hetero::{normal_sf, run_test, statistic_t, PreparedTest, Sidedness, TestReport};
pub use linalg::{hadamard_power, Matrix};
pub use moments::{
    cumulants_from_moments, delta_method_variance, general_moments, null_moments,
    ErrorMomentProfile, GeneralMoments, NullMoments,
};
pub use oracle::{enumerate_two_point, naive_omega_sum, ExactMoments, OmegaPattern};
pub use regression::{ols_fit, projection_matrix, DesignMatrix, OlsFit, ProjectionMatrix};

/// Largest sample size for which the dense kernels are supported.
pub const MAX_N: usize = 4096;
