//! Encoder and receiver arithmetic shared by every trial variant.

use crate::analysis::ErrorState;
use crate::error::{Error, Result};
use crate::float::sqrt;
use crate::model::ChannelParams;

use super::message::{message_point_variance, MessagePoint};
use super::schedule::input_weights;

/// Estimation errors `eps_nu = theta_hat_nu - theta_nu` after `schedule_index`
/// channel uses, with the analytic moments the next coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoderState {
    pub eps1: f64,
    pub eps2: f64,
    pub schedule_index: u32,
    pub moments: ErrorState,
}

/// Inputs of the two dedicated channel uses, `sqrt(P / Var(theta)) * theta`.
pub fn encode_init(theta1: &MessagePoint, theta2: &MessagePoint, params: &ChannelParams) -> Result<(f64, f64)> {
    Ok((dedicated_input(theta1, params, 1)?, dedicated_input(theta2, params, 2)?))
}

fn dedicated_input(point: &MessagePoint, params: &ChannelParams, receiver: u8) -> Result<f64> {
    if point.level_count < 2 {
        return Err(Error::DegenerateMessage { receiver });
    }
    let var = message_point_variance(point.level_count);
    Ok(sqrt(params.power() / var) * point.theta)
}

/// Error of the estimate `sqrt(Var / P) * y` formed after a dedicated use.
///
/// Written in terms of `y - x` so that both ends of the link evaluate the same
/// expression and the message point never has to be subtracted back out.
#[inline]
pub fn initial_estimation_error(y: f64, x: f64, var: f64, power: f64) -> f64 {
    sqrt(var / power) * (y - x)
}

/// Next channel input, a weighted sum of the two current errors.
pub fn encode_step(state: &CoderState, params: &ChannelParams) -> Result<f64> {
    let (w1, w2) = input_weights(&state.moments, params)?;
    Ok(w1 * state.eps1 + w2 * state.eps2)
}

/// One LMMSE correction: the receiver subtracts its estimate of the error.
#[inline]
pub fn receiver_update(eps_prev: f64, y: f64, coeff: f64) -> f64 {
    eps_prev - coeff * y
}
