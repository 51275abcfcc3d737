//! Gaussian bosonic density matrices.
//!
//! * [`state`]: the kernel ([`KernelParams`]) and moment ([`MomentSet`])
//!   descriptions and the exact maps between them.
//! * [`spectrum`]: single-mode product form, entropy, `E_M`, largest
//!   eigenvalues, plus brute-force oracles.
//! * [`chain`]: ground state of a harmonic ring and its subregions.
//! * [`precise`]: the chain pipeline in double-double arithmetic.
//! * [`dynamics`]: moment evolution under a quadratic Lagrangian.
//! * [`cft`]: conformal log-sin and size-scaling fits.

// `!(x > 0.0)` is used on purpose so that NaN takes the error branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cft;
pub mod chain;
pub mod dynamics;
mod error;
pub mod linalg;
pub mod precise;
pub mod spectrum;
pub mod state;

pub use cft::{fit_log_sin, fit_size_scaling, holzhey_entropy, ConformalThresholds, FitMode, FitResult};
pub use chain::{ground_state_moments, reduce_region, region_entropy, region_spectrum, Boundary, ChainConfig, Region};
pub use dynamics::{evolve, evolve_params, moment_derivatives, QuadraticModel, Trajectory};
pub use error::{Error, ErrorClass, Result};
pub use precise::region_spectrum_extended;
pub use spectrum::{
    entropy, entropy_in, entropy_terms, mode_spectrum_from_moments, mode_spectrum_from_params, product_identification,
    top_eigenvalues, xi_from_eta, EigenvalueRecord, LogBase, ModeSpectrum,
};
pub use state::{
    moments_from_params, params_from_moments, KernelParams, MomentSet, Tolerances, Validate, ValidationReport,
};
