use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::{log10, powf};
use crate::model::{ChannelParams, NoiseSpec};

use super::asymptotics::validate_grid;
use super::cubic::solve_fixed_point;
use super::rates::rates_at_fixed_point;

/// One row of a power sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub power: f64,
    pub rho_star: f64,
    pub gap: f64,
    pub r1: f64,
    pub r2: f64,
    pub sum: f64,
    pub prelog_ratio: f64,
    /// `P^(1 - delta) * gap`
    pub scaled_gap: f64,
}

/// Logarithmic grid from `p_start` to `p_stop` with `per_decade` points per decade.
///
/// Points sit at exact powers of ten offsets from `p_start`, so a grid from
/// `1e2` with four points per decade hits every integer decade exactly.
pub fn log_grid(p_start: f64, p_stop: f64, per_decade: u32) -> Result<Vec<f64>> {
    if !(p_start.is_finite() && p_start > 0.0) {
        return Err(Error::param("p_start", "must be positive and finite"));
    }
    if !(p_stop.is_finite() && p_stop > p_start) {
        return Err(Error::param("p_stop", "must be finite and exceed p_start"));
    }
    if per_decade == 0 {
        return Err(Error::param("points_per_decade", "must be at least 1"));
    }
    let e0 = log10(p_start);
    let steps = ((log10(p_stop) - e0) * per_decade as f64 + 1e-9) as u32;
    Ok((0..=steps).map(|i| powf(10.0, e0 + i as f64 / per_decade as f64)).collect())
}

/// Preconditions of [`sweep`]: an increasing grid over at least two decades
/// and `delta` in `(0, 1]`. Lets callers evaluate [`sweep_point`] themselves.
pub fn validate_sweep(grid: &[f64], delta: f64) -> Result<()> {
    validate_grid(grid, 2.0)?;
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::param("delta", "must lie in (0, 1]"));
    }
    Ok(())
}

pub fn sweep(noise: &NoiseSpec, grid: &[f64], delta: f64, tol: f64) -> Result<Vec<SweepRow>> {
    validate_sweep(grid, delta)?;
    grid.iter().map(|&p| sweep_point(noise, p, delta, tol)).collect()
}

pub fn sweep_point(noise: &NoiseSpec, power: f64, delta: f64, tol: f64) -> Result<SweepRow> {
    let params = ChannelParams::new(power, *noise)?;
    let fp = solve_fixed_point(&params, tol)?;
    let rates = rates_at_fixed_point(&params, &fp);
    Ok(SweepRow {
        power,
        rho_star: fp.rho_star,
        gap: fp.gap,
        r1: rates.r1,
        r2: rates.r2,
        sum: rates.sum,
        prelog_ratio: rates.prelog_ratio,
        scaled_gap: powf(power, 1.0 - delta) * fp.gap,
    })
}
