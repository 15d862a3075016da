//! Error-moment recursions of the feedback scheme.
//!
//! [`step_error_state`] advances the variances of the two receivers'
//! estimation errors and their correlation coefficient by one channel use.
//! The correlation update is the standard three-term expression rearranged so
//! that `1 - rho^2` and `1 - P/sqrt((P+s1^2)(P+s2^2))` enter as explicitly
//! computed gaps; near `|rho| = 1` and for large `P` this keeps full relative
//! precision where the textbook form cancels.

use crate::error::{Error, Result};
use crate::float::sign;
use crate::model::ChannelParams;

use super::terms::Terms;

/// Variances of the two estimation errors and their correlation at step `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorState {
    pub alpha1: f64,
    pub alpha2: f64,
    pub rho: f64,
    pub step_index: u32,
}

impl ErrorState {
    pub fn new(alpha1: f64, alpha2: f64, rho: f64, step_index: u32) -> Result<ErrorState> {
        if !(alpha1 >= 0.0 && alpha1.is_finite()) {
            return Err(Error::param("alpha1", "must be non-negative and finite"));
        }
        if !(alpha2 >= 0.0 && alpha2.is_finite()) {
            return Err(Error::param("alpha2", "must be non-negative and finite"));
        }
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::param("rho", "must lie in [-1, 1]"));
        }
        if step_index < 2 {
            return Err(Error::param("step_index", "the recursion starts at k = 2"));
        }
        Ok(ErrorState { alpha1, alpha2, rho, step_index })
    }
}

/// Power-split parameter `gamma = sigma1 / sigma2`.
pub fn gamma(noise: &crate::model::NoiseSpec) -> f64 {
    noise.sigma1() / noise.sigma2()
}

/// One step of the recursion for the correlation magnitude only.
///
/// `mag` is `|rho_{k-1}|` and `one_minus_sq` is `1 - rho_{k-1}^2`, passed
/// separately so callers holding the gap `1 - |rho|` can supply it exactly.
/// Returns `rho_k` for a non-negative `rho_{k-1}`.
pub(crate) fn next_rho_nonneg(t: &Terms, mag: f64, one_minus_sq: f64) -> f64 {
    let cross = t.v1 + t.v2 + 2.0 * t.s12 * mag;
    let q = t.p * one_minus_sq + cross;
    let k = (t.s1 + t.s2 * mag) * (t.s2 + t.s1 * mag);
    let bracket = k * t.innovation_gap() - t.s12 * one_minus_sq;
    t.root / (q * t.s12) * bracket
}

/// `| |step(rho)| - rho |` for `rho = 1 - gap >= 0`.
pub(crate) fn fixed_point_residual(t: &Terms, gap: f64) -> f64 {
    let mag = 1.0 - gap;
    let next = next_rho_nonneg(t, mag, gap * (2.0 - gap));
    (next.abs() - mag).abs()
}

/// Advance `(alpha1, alpha2, rho)` by one channel use.
pub fn step_error_state(state: &ErrorState, params: &ChannelParams) -> Result<ErrorState> {
    let t = Terms::new(params);
    let mag = state.rho.abs();
    let one_minus_sq = (1.0 - mag) * (1.0 + mag);
    let cross = t.v1 + t.v2 + 2.0 * t.s12 * mag;
    let q = t.p * one_minus_sq + cross;

    let alpha1 = state.alpha1 * (t.v1 * q) / (cross * (t.p + t.v1));
    let alpha2 = state.alpha2 * (t.v2 * q) / (cross * (t.p + t.v2));
    let mut rho = sign(state.rho) * next_rho_nonneg(&t, mag, one_minus_sq);

    if !rho.is_finite() || rho.abs() > 1.0 + 1e-12 {
        return Err(Error::NumericalIntegrity("correlation left [-1, 1] after update"));
    }
    rho = rho.clamp(-1.0, 1.0);
    Ok(ErrorState { alpha1, alpha2, rho, step_index: state.step_index + 1 })
}
