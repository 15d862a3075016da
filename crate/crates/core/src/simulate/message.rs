//! Message sets, message points and nearest-point decoding.

use crate::analysis::{rates_at_fixed_point, solve_fixed_point, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::float::{ceil, exp2};
use crate::model::ChannelParams;

/// Largest supported `n * R` in bits; keeps level counts inside `u128`.
pub const MAX_MESSAGE_BITS: f64 = 126.0;

/// Block length and the two transmission rates (bits per channel use).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MessageConfig {
    n: u32,
    rate1: f64,
    rate2: f64,
}

impl MessageConfig {
    pub fn new(n: u32, rate1: f64, rate2: f64) -> Result<MessageConfig> {
        if n < 3 {
            return Err(Error::param("block_length", "must be at least 3"));
        }
        for (field, rate) in [("rate1", rate1), ("rate2", rate2)] {
            if !(rate.is_finite() && rate >= 0.0) {
                return Err(Error::param(field, "must be non-negative and finite"));
            }
            if n as f64 * rate > MAX_MESSAGE_BITS {
                return Err(Error::param(field, "n * rate exceeds 126 bits"));
            }
        }
        Ok(MessageConfig { n, rate1, rate2 })
    }

    /// Rates set to `fraction` of the achievable pair at the fixed point.
    pub fn from_rate_fraction(n: u32, params: &ChannelParams, fraction: f64) -> Result<MessageConfig> {
        if !(fraction.is_finite() && fraction > 0.0) {
            return Err(Error::param("rate_fraction", "must be positive and finite"));
        }
        let fp = solve_fixed_point(params, DEFAULT_TOL)?;
        let rates = rates_at_fixed_point(params, &fp);
        MessageConfig::new(n, fraction * rates.r1, fraction * rates.r2)
    }

    pub fn block_length(&self) -> u32 {
        self.n
    }

    pub fn rate1(&self) -> f64 {
        self.rate1
    }

    pub fn rate2(&self) -> f64 {
        self.rate2
    }

    /// `(ceil(2^(n R1)), ceil(2^(n R2)))`.
    pub fn level_counts(&self) -> (u128, u128) {
        (level_count(self.n, self.rate1), level_count(self.n, self.rate2))
    }
}

/// Size of the message set, `ceil(2^(n * rate))`.
pub fn level_count(n: u32, rate: f64) -> u128 {
    ceil(exp2(n as f64 * rate)) as u128
}

/// Point of the uniform grid `{1/2 - (m - 1)/L}` that represents message `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MessagePoint {
    pub index: u128,
    pub level_count: u128,
    pub theta: f64,
}

pub fn map_message(m: u128, level_count: u128) -> Result<MessagePoint> {
    if level_count == 0 {
        return Err(Error::param("level_count", "must be at least 1"));
    }
    if m == 0 || m > level_count {
        return Err(Error::param("message", "must lie in 1..=L"));
    }
    let theta = 0.5 - (m - 1) as f64 / level_count as f64;
    Ok(MessagePoint { index: m, level_count, theta })
}

/// Variance of a uniformly chosen point of the `L`-point grid: `(L^2 - 1) / (12 L^2)`.
pub fn message_point_variance(level_count: u128) -> f64 {
    let inv = 1.0 / level_count as f64;
    (1.0 - inv * inv) / 12.0
}

/// Nearest grid point to an estimate; exact midpoints go to the smaller index.
pub fn decode(theta_estimate: f64, level_count: u128) -> u128 {
    let l = level_count as f64;
    if theta_estimate.is_nan() {
        return 1;
    }
    let position = (0.5 - theta_estimate) * l + 1.0;
    let m = ceil(position - 0.5).clamp(1.0, l);
    (m as u128).clamp(1, level_count)
}

/// Decode `theta(m) + eps` working in index space, so the result stays exact
/// when the grid is finer than `f64` can resolve around `theta(m)`.
pub fn decode_offset(m: u128, eps: f64, level_count: u128) -> u128 {
    let shift = ceil(-eps * level_count as f64 - 0.5);
    if shift.is_nan() {
        return m;
    }
    let shift = shift as i128;
    let m = m as i128;
    m.saturating_add(shift).clamp(1, level_count as i128) as u128
}
