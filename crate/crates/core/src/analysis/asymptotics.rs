//! Finite-`P` probes of the high-power limits behind the pre-log argument.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::{log10, powf};
use crate::model::{ChannelParams, NoiseSpec};

use super::cubic::{gap_cubic_coeffs, solve_gap, DEFAULT_TOL};
use super::terms::Terms;

/// One grid point of the asymptotics report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticsRow {
    pub power: f64,
    pub lambda2: f64,
    /// `|lambda2 - 2|`
    pub lambda2_dev: f64,
    /// `P^(1 - eps/2) * lambda1`
    pub scaled_lambda1: f64,
    /// `P * (1 - P / sqrt((P + s1^2)(P + s2^2)))`
    pub root_gap_scaled: f64,
    /// distance of `root_gap_scaled` to `(s1^2 + s2^2) / 2`
    pub root_gap_dev: f64,
    /// `P^(2 - delta - eps) * lambda0`; only for `rho_z = -1`.
    pub scaled_lambda0: Option<f64>,
    /// `P^(1 - delta) * g(P)`
    pub scaled_gap: f64,
}

/// Named PASS/FAIL outcome of one limit check.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: &'static str,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsReport {
    pub noise: NoiseSpec,
    pub delta: f64,
    pub eps: f64,
    /// `(s1^2 + s2^2) / 2`
    pub root_gap_limit: f64,
    pub rows: Vec<AsymptoticsRow>,
    pub verdicts: Vec<Verdict>,
}

impl AsymptoticsReport {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

/// Strictly decreasing over the grid points within three decades of the largest.
fn decreasing_tail(rows: &[AsymptoticsRow], value: impl Fn(&AsymptoticsRow) -> f64) -> bool {
    let last = rows[rows.len() - 1].power;
    let tail: Vec<f64> = rows.iter().filter(|r| r.power >= last / 1e3 * (1.0 - 1e-12)).map(value).collect();
    tail.len() >= 2 && tail.windows(2).all(|w| w[1] < w[0])
}

pub(crate) fn validate_grid(grid: &[f64], min_decades: f64) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::param("p_grid", "needs at least two points"));
    }
    if grid.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(Error::param("p_grid", "powers must be positive and finite"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("p_grid", "must be strictly increasing"));
    }
    if log10(grid[grid.len() - 1] / grid[0]) < min_decades - 1e-9 {
        return Err(Error::param("p_grid", "does not span enough decades"));
    }
    Ok(())
}

pub fn verify_asymptotics(noise: &NoiseSpec, p_grid: &[f64], delta: f64, eps: f64) -> Result<AsymptoticsReport> {
    validate_grid(p_grid, 4.0)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", "must lie in (0, 1)"));
    }
    if !(eps > 0.0 && eps < delta) {
        return Err(Error::param("eps", "must lie in (0, delta)"));
    }
    let antipodal = noise.rho_z() == -1.0;
    let limit = 0.5 * (noise.sigma1() * noise.sigma1() + noise.sigma2() * noise.sigma2());

    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let params = ChannelParams::new(p, *noise)?;
        let lam = gap_cubic_coeffs(&params);
        let t = Terms::new(&params);
        let g = solve_gap(&params, DEFAULT_TOL)?;
        let root_gap_scaled = p * t.root_gap;
        rows.push(AsymptoticsRow {
            power: p,
            lambda2: lam.lambda2,
            lambda2_dev: (lam.lambda2 - 2.0).abs(),
            scaled_lambda1: powf(p, 1.0 - eps / 2.0) * lam.lambda1,
            root_gap_scaled,
            root_gap_dev: (root_gap_scaled - limit).abs(),
            scaled_lambda0: antipodal.then(|| powf(p, 2.0 - delta - eps) * lam.lambda0),
            scaled_gap: powf(p, 1.0 - delta) * g,
        });
    }

    let mut verdicts = alloc::vec![
        Verdict { name: "lambda2_to_two", passed: decreasing_tail(&rows, |r| r.lambda2_dev) },
        Verdict { name: "scaled_lambda1_to_zero", passed: decreasing_tail(&rows, |r| r.scaled_lambda1.abs()) },
        Verdict {
            name: "root_gap_to_limit",
            passed: decreasing_tail(&rows, |r| r.root_gap_dev) && rows[rows.len() - 1].root_gap_dev < 0.01 * limit,
        },
    ];
    if antipodal {
        verdicts.push(Verdict {
            name: "scaled_lambda0_to_zero",
            passed: decreasing_tail(&rows, |r| r.scaled_lambda0.map_or(f64::NAN, f64::abs)),
        });
    }
    verdicts.push(Verdict { name: "scaled_gap_to_zero", passed: decreasing_tail(&rows, |r| r.scaled_gap) });

    Ok(AsymptoticsReport { noise: *noise, delta, eps, root_gap_limit: limit, rows, verdicts })
}
