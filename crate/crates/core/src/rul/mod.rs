//! Lifetime bookkeeping, RUL conversion, smoothing and accuracy metrics.

mod report;
mod savgol;

pub use report::{BearingResult, EvaluationReport, ReportRow};
pub use savgol::{savgol_coefficients, savitzky_golay};

use log::warn;

use crate::error::{Error, Result};

/// Life ratios below this are too close to zero for a usable RUL.
pub const RATIO_FLOOR: f64 = 1e-3;

/// Past-useful-life ratio `tau / tau_r`.
pub fn pul_ratio(tau: f64, lifetime: f64) -> Result<f64> {
    if !(lifetime > 0.0) {
        return Err(Error::input(format!("lifetime must be positive, got {lifetime}")));
    }
    if !(0.0..=lifetime).contains(&tau) {
        return Err(Error::input(format!("elapsed time {tau} is outside [0, {lifetime}]")));
    }
    Ok(tau / lifetime)
}

/// Remaining useful life in seconds, or indeterminate when the ratio is too
/// small for `1/ratio` to carry information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rul {
    Finite(f64),
    Indeterminate,
}

impl Rul {
    pub fn value(self) -> Option<f64> {
        match self {
            Rul::Finite(v) => Some(v),
            Rul::Indeterminate => None,
        }
    }
}

/// Remaining life `(1/ratio - 1) * tau` from an estimated life ratio.
pub fn rul_from_ratio(ratio: f64, tau: f64) -> Result<Rul> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::input(format!("elapsed time must be non-negative, got {tau}")));
    }
    if ratio.is_nan() || ratio > 1.0 {
        return Err(Error::input(format!("life ratio {ratio} is outside (0, 1]")));
    }
    if ratio < RATIO_FLOOR {
        return Ok(Rul::Indeterminate);
    }
    Ok(Rul::Finite((1.0 / ratio - 1.0) * tau))
}

/// Relative root mean square error of estimated against true life ratios.
///
/// Observations with a true ratio of exactly zero are dropped (the relative
/// error is undefined there).
pub fn rrmse(truth: &[f64], estimate: &[f64]) -> Result<f64> {
    if truth.len() != estimate.len() {
        return Err(Error::input(format!(
            "{} true ratios but {} estimates",
            truth.len(),
            estimate.len()
        )));
    }
    let mut acc = 0.0;
    let mut n = 0usize;
    for (&t, &e) in truth.iter().zip(estimate) {
        if t == 0.0 {
            continue;
        }
        acc += ((t - e) / t).powi(2);
        n += 1;
    }
    if n < truth.len() {
        warn!("dropped {} observations with zero life ratio from RRMSE", truth.len() - n);
    }
    if n == 0 {
        return Err(Error::input("no observations with non-zero life ratio"));
    }
    Ok((acc / n as f64).sqrt())
}

/// Average RRMSE over test bearings.
pub fn arrmse(per_bearing: &[f64]) -> Result<f64> {
    if per_bearing.is_empty() {
        return Err(Error::input("ARRMSE needs at least one bearing"));
    }
    Ok(per_bearing.iter().sum::<f64>() / per_bearing.len() as f64)
}
