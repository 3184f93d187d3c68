//! Takagi-Sugeno fuzzy models for bearing remaining-useful-life estimation.
//!
//! The model maps condition indicators extracted from vibration windows to
//! the past-useful-life ratio `rho = tau / tau_R`, from which the remaining
//! life follows. Rules come from subtractive clustering of the joint
//! input/output training matrix; consequents are fitted by least squares,
//! either with the plain normalized firing degrees ([`fis::Variant::Baseline`])
//! or with degrees re-weighted by maximum-likelihood mixture estimates of the
//! regime priors and their projections on the time axis
//! ([`fis::Variant::Weighted`]).
//!
//! Modules, bottom-up:
//! - [`features`]: RMS, spectral entropy, approximate entropy, largest
//!   Lyapunov exponent, correlation dimension and the AE degradation index.
//! - [`clustering`]: subtractive clustering and membership spreads.
//! - [`mixture`]: firing strengths, time clusters and mixture densities.
//! - [`fis`]: the rule base, identification and model files.
//! - [`rul`]: life-ratio bookkeeping, smoothing and error metrics.
//! - [`datasets`]: PHM 2012 / IMS loaders and a synthetic generator.
//! - [`pipeline`]: train / predict / evaluate orchestration.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clustering;
pub mod config;
pub mod datasets;
pub mod error;
pub mod features;
pub mod fis;
pub mod mixture;
pub mod pipeline;
pub mod rul;

pub use error::{Error, Result};
