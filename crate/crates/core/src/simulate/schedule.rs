//! Per-step encoder weights and LMMSE receiver coefficients.
//!
//! Every coefficient is a deterministic function of the parameters and the
//! initial error moments, so a schedule is computed once and shared read-only
//! by all trials.

use alloc::vec::Vec;

use crate::analysis::{gamma, solve_fixed_point, step_error_state, ErrorState, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::float::{sign, sqrt};
use crate::model::ChannelParams;

/// How the coefficient schedule is seeded at step 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    /// Moments produced by the two dedicated channel uses (`rho_2 = 0`).
    #[default]
    Natural,
    /// Starting correlation overridden with the fixed point `rho*`, for
    /// studying the pinned regime. The simulated errors still start uncorrelated.
    FixedPoint,
}

/// Moments after the two dedicated channel uses.
pub fn natural_initial_state(params: &ChannelParams, var1: f64, var2: f64) -> Result<ErrorState> {
    let p = params.power();
    let n = params.noise();
    ErrorState::new(var1 / p * n.sigma1() * n.sigma1(), var2 / p * n.sigma2() * n.sigma2(), 0.0, 2)
}

/// Encoder weights: `X = w1 * eps1 + w2 * eps2`.
pub(crate) fn input_weights(moments: &ErrorState, params: &ChannelParams) -> Result<(f64, f64)> {
    if !(moments.alpha1 > 0.0 && moments.alpha2 > 0.0) {
        return Err(Error::NumericalIntegrity("error variance reached zero"));
    }
    let g = gamma(params.noise());
    let mag = moments.rho.abs();
    let scale = sqrt(params.power() / (1.0 + g * g + 2.0 * g * mag));
    let w1 = scale / sqrt(moments.alpha1);
    let w2 = scale * g * sign(moments.rho) / sqrt(moments.alpha2);
    if !(w1.is_finite() && w2.is_finite()) {
        return Err(Error::NumericalIntegrity("encoder weight is not finite"));
    }
    Ok((w1, w2))
}

/// Everything the encoder and both receivers need for one feedback step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmmseStep {
    /// Moments of `(eps1, eps2)` before the step.
    pub prior: ErrorState,
    pub weight1: f64,
    pub weight2: f64,
    /// `Cov(eps_nu, Y_nu) / Var(Y_nu)` for each receiver.
    pub coeff1: f64,
    pub coeff2: f64,
    /// `Var(Y_nu)` from the moments; equals `P + sigma_nu^2`.
    pub output_var1: f64,
    pub output_var2: f64,
    /// Moments after the step, from the closed-form recursion.
    pub posterior: ErrorState,
}

impl LmmseStep {
    pub fn new(prior: ErrorState, params: &ChannelParams) -> Result<LmmseStep> {
        let (w1, w2) = input_weights(&prior, params)?;
        let m = Moments::of(&prior, w1, w2, params);
        let posterior = step_error_state(&prior, params)?;
        Ok(LmmseStep {
            prior,
            weight1: w1,
            weight2: w2,
            coeff1: m.cov_e1_x / m.var_y1,
            coeff2: m.cov_e2_x / m.var_y2,
            output_var1: m.var_y1,
            output_var2: m.var_y2,
            posterior,
        })
    }

    /// Moments after applying the coefficients, obtained by propagating the
    /// covariance of `(eps1, eps2, Z1, Z2)` through the update instead of the
    /// closed-form recursion.
    pub fn induced_posterior(&self, params: &ChannelParams) -> ErrorState {
        let m = Moments::of(&self.prior, self.weight1, self.weight2, params);
        let (c1, c2) = (self.coeff1, self.coeff2);
        let alpha1 = self.prior.alpha1 - 2.0 * c1 * m.cov_e1_x + c1 * c1 * m.var_y1;
        let alpha2 = self.prior.alpha2 - 2.0 * c2 * m.cov_e2_x + c2 * c2 * m.var_y2;
        let cov = m.cov_e1_e2 - c2 * m.cov_e1_x - c1 * m.cov_e2_x + c1 * c2 * m.cov_y1_y2;
        ErrorState { alpha1, alpha2, rho: cov / sqrt(alpha1 * alpha2), step_index: self.prior.step_index + 1 }
    }
}

struct Moments {
    cov_e1_e2: f64,
    cov_e1_x: f64,
    cov_e2_x: f64,
    var_y1: f64,
    var_y2: f64,
    cov_y1_y2: f64,
}

impl Moments {
    fn of(s: &ErrorState, w1: f64, w2: f64, params: &ChannelParams) -> Moments {
        let n = params.noise();
        let cov_e1_e2 = s.rho * sqrt(s.alpha1 * s.alpha2);
        let cov_e1_x = w1 * s.alpha1 + w2 * cov_e1_e2;
        let cov_e2_x = w1 * cov_e1_e2 + w2 * s.alpha2;
        let var_x = w1 * cov_e1_x + w2 * cov_e2_x;
        Moments {
            cov_e1_e2,
            cov_e1_x,
            cov_e2_x,
            var_y1: var_x + n.sigma1() * n.sigma1(),
            var_y2: var_x + n.sigma2() * n.sigma2(),
            cov_y1_y2: var_x + n.rho_z() * n.sigma1() * n.sigma2(),
        }
    }
}

/// Coefficients for steps `initial.step_index + 1 ..= n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSchedule {
    pub initial: ErrorState,
    pub steps: Vec<LmmseStep>,
}

impl CoefficientSchedule {
    /// Step `k` of the block (`k >= 3`).
    pub fn step(&self, k: u32) -> Option<&LmmseStep> {
        let first = self.initial.step_index + 1;
        k.checked_sub(first).and_then(|i| self.steps.get(i as usize))
    }

    /// Analytic moments after step `k` (`k >= 2`).
    pub fn moments(&self, k: u32) -> Option<ErrorState> {
        if k == self.initial.step_index {
            Some(self.initial)
        } else {
            self.step(k).map(|s| s.posterior)
        }
    }
}

pub fn lmmse_coefficient_schedule(params: &ChannelParams, initial: ErrorState, n: u32) -> Result<CoefficientSchedule> {
    if n < 3 {
        return Err(Error::param("block_length", "must be at least 3"));
    }
    let mut steps = Vec::with_capacity(n.saturating_sub(initial.step_index) as usize);
    let mut state = initial;
    while state.step_index < n {
        let step = LmmseStep::new(state, params)?;
        state = step.posterior;
        steps.push(step);
    }
    Ok(CoefficientSchedule { initial, steps })
}

/// Initial moments for the given variances of the message points and mode.
pub fn initial_state(params: &ChannelParams, var1: f64, var2: f64, mode: InitMode) -> Result<ErrorState> {
    let mut state = natural_initial_state(params, var1, var2)?;
    if mode == InitMode::FixedPoint {
        state.rho = solve_fixed_point(params, DEFAULT_TOL)?.rho_star;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{NoiseSpec, RngSpec};
    use rand::Rng;

    fn params(p: f64, s1: f64, s2: f64, rz: f64) -> ChannelParams {
        ChannelParams::new(p, NoiseSpec::new(s1, s2, rz).unwrap()).unwrap()
    }

    #[test]
    fn output_variance_is_power_plus_noise() {
        let pr = params(100.0, 1.0, 1.0, -1.0);
        let init = natural_initial_state(&pr, 0.08, 0.08).unwrap();
        let sched = lmmse_coefficient_schedule(&pr, init, 30).unwrap();
        assert_eq!(sched.steps.len(), 28);
        for s in &sched.steps {
            assert!((s.output_var1 - 101.0).abs() < 1e-11);
            assert!((s.output_var2 - 101.0).abs() < 1e-11);
        }
    }

    #[test]
    fn induced_moments_reproduce_recursion() {
        let mut rng = RngSpec::new(7, 0).rng();
        for _ in 0..100 {
            let p = libm::pow(10.0, rng.random_range(-1.0..3.0));
            let pr = params(p, rng.random_range(0.5..2.0), rng.random_range(0.5..2.0), rng.random_range(-1.0..=1.0));
            let init = natural_initial_state(&pr, 0.08, 0.07).unwrap();
            let sched = match lmmse_coefficient_schedule(&pr, init, 50) {
                Ok(s) => s,
                // variances can underflow for large P over 50 steps
                Err(Error::NumericalIntegrity(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            for s in &sched.steps {
                let ind = s.induced_posterior(&pr);
                let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
                assert!(rel(ind.alpha1, s.posterior.alpha1) <= 1e-12, "alpha1 at p={p}");
                assert!(rel(ind.alpha2, s.posterior.alpha2) <= 1e-12, "alpha2 at p={p}");
                assert!((ind.rho - s.posterior.rho).abs() <= 1e-12, "rho at p={p}");
            }
        }
    }

    #[test]
    fn symmetric_state_gives_equal_coefficients() {
        let pr = params(50.0, 1.3, 1.3, -1.0);
        let init = natural_initial_state(&pr, 0.08, 0.08).unwrap();
        let sched = lmmse_coefficient_schedule(&pr, init, 10).unwrap();
        for s in &sched.steps {
            assert!((s.coeff1.abs() - s.coeff2.abs()).abs() <= 1e-14 * s.coeff1.abs());
        }
    }

    #[test]
    fn schedule_indexing() {
        let pr = params(10.0, 1.0, 1.0, 0.0);
        let init = natural_initial_state(&pr, 0.08, 0.08).unwrap();
        let sched = lmmse_coefficient_schedule(&pr, init, 5).unwrap();
        assert!(sched.step(2).is_none());
        assert_eq!(sched.step(3).unwrap().prior.step_index, 2);
        assert_eq!(sched.moments(5).unwrap().step_index, 5);
        assert!(sched.step(6).is_none());
        assert_eq!(sched.moments(2), Some(init));
    }

    #[test]
    fn fixed_point_init_overrides_correlation() {
        let pr = params(10.0, 1.0, 1.0, -1.0);
        let st = initial_state(&pr, 0.08, 0.08, InitMode::FixedPoint).unwrap();
        assert!((st.rho - 0.889399164116).abs() < 1e-9);
        let sched = lmmse_coefficient_schedule(&pr, st, 8).unwrap();
        for (i, s) in sched.steps.iter().enumerate() {
            let want = if i % 2 == 0 { -st.rho } else { st.rho };
            assert!((s.posterior.rho - want).abs() < 1e-9);
        }
    }
}
