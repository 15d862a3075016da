use core::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::float::log2;
use crate::model::{ChannelParams, Receiver};

use super::cubic::FixedPoint;

/// Achievable rate pair at power `P` and its finite-`P` pre-log quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub power: f64,
    /// Bits per channel use.
    pub r1: f64,
    pub r2: f64,
    pub sum: f64,
    /// `(r1 + r2) / (log2(1 + P) / 2)`.
    pub prelog_ratio: f64,
}

/// `log2(1 + x) / 2` without losing precision for small `x`.
fn half_log2_1p(x: f64) -> f64 {
    libm::log1p(x) / LN_2 / 2.0
}

/// Rates for a correlation given through its gap `1 - rho`.
pub fn rates_from_gap(params: &ChannelParams, gap: f64) -> Result<RatePoint> {
    if !(0.0..=1.0).contains(&gap) {
        return Err(Error::param("rho", "must lie in [0, 1]"));
    }
    let p = params.power();
    let noise = params.noise();
    let rate = |sigma: f64| {
        let v = sigma * sigma;
        0.5 * log2((p + v) / (0.5 * p * gap + v))
    };
    let r1 = rate(noise.sigma1());
    let r2 = rate(noise.sigma2());
    let sum = r1 + r2;
    Ok(RatePoint { power: p, r1, r2, sum, prelog_ratio: sum / half_log2_1p(p) })
}

pub fn achievable_rates(params: &ChannelParams, rho: f64) -> Result<RatePoint> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::param("rho", "must lie in [0, 1]"));
    }
    rates_from_gap(params, 1.0 - rho)
}

/// Rates at a solved fixed point, using its independently computed gap.
pub fn rates_at_fixed_point(params: &ChannelParams, fp: &FixedPoint) -> RatePoint {
    // gap is in [0, 1] by construction of FixedPoint
    rates_from_gap(params, fp.gap.clamp(0.0, 1.0)).expect("gap lies in [0, 1]")
}

/// Rate receiver `k` could reach if the other receiver did not exist.
pub fn single_user_bound(params: &ChannelParams, receiver: Receiver) -> f64 {
    let sigma = params.noise().sigma(receiver);
    half_log2_1p(params.power() / (sigma * sigma))
}
