//! Deterministic mathematics of the scheme: error-moment recursions, the
//! fixed-point cubic and its gap form, achievable rates, high-power
//! asymptotics and the K-receiver pre-log classifier.

mod asymptotics;
mod classify;
mod cubic;
mod rates;
mod recursion;
mod sweep;
mod terms;

pub use asymptotics::{verify_asymptotics, AsymptoticsReport, AsymptoticsRow, Verdict};
pub use classify::{prelog_classify, symmetric_eigenvalues, Prelog, PrelogClass, PSD_TOL};
pub use cubic::{
    cubic_coeffs, gap_cubic_coeffs, solve_fixed_point, solve_gap, CubicCoeffs, FixedPoint, GapCubicCoeffs,
    BISECTION_WIDTH, DEFAULT_TOL, GAP_SWITCH, RECURSION_TOL, SCAN_INTERVALS,
};
pub use rates::{achievable_rates, rates_at_fixed_point, rates_from_gap, single_user_bound, RatePoint};
pub use recursion::{gamma, step_error_state, ErrorState};
pub use sweep::{log_grid, sweep, sweep_point, validate_sweep, SweepRow};
