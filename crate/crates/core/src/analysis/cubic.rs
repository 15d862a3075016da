//! The fixed-point cubic in `rho` and its counterpart in the gap `g = 1 - rho`.
//!
//! Both are solved by a sign-change scan followed by bisection. The `rho`
//! form is used away from `rho = 1`; close to it every root is recovered from
//! the gap form, whose coefficients are assembled from cancellation-free
//! terms, so `g` keeps its relative precision even at `P = 1e10`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::ChannelParams;

use super::recursion::fixed_point_residual;
use super::terms::Terms;

/// Subintervals of `[0, 1]` scanned for sign changes.
pub const SCAN_INTERVALS: usize = 1024;
/// Bisection stops once the `rho` bracket is narrower than this.
pub const BISECTION_WIDTH: f64 = 1e-12;
/// Default scaled residual tolerance for roots of the cubic.
pub const DEFAULT_TOL: f64 = 1e-10;
/// A root is accepted as a fixed point of the recursion below this residual.
pub const RECURSION_TOL: f64 = 1e-6;
/// Above this `rho` the root is taken from the gap form.
pub const GAP_SWITCH: f64 = 0.999;

/// Residuals closer than this are treated as equal when picking a root.
const TIE_TOL: f64 = 1e-9;

/// Coefficients of `rho^3 + a rho^2 + b rho + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl CubicCoeffs {
    pub fn eval(&self, rho: f64) -> f64 {
        ((rho + self.a) * rho + self.b) * rho + self.c
    }

    pub fn scale(&self) -> f64 {
        1.0 + self.a.abs() + self.b.abs() + self.c.abs()
    }

    /// Coefficients of the same polynomial expressed in `g = 1 - rho`, as
    /// `[const, g, g^2, g^3]`.
    pub fn shifted(&self) -> [f64; 4] {
        let (a, b, c) = (self.a, self.b, self.c);
        [1.0 + a + b + c, -3.0 - 2.0 * a - b, 3.0 + a, -1.0]
    }
}

/// Coefficients of `-g^3 + lambda2 g^2 + lambda1 g + lambda0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapCubicCoeffs {
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl GapCubicCoeffs {
    pub fn eval(&self, g: f64) -> f64 {
        ((-g + self.lambda2) * g + self.lambda1) * g + self.lambda0
    }

    pub fn scale(&self) -> f64 {
        1.0 + self.lambda0.abs() + self.lambda1.abs() + self.lambda2.abs()
    }
}

/// Root of the cubic that is a genuine fixed point of the correlation recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub rho_star: f64,
    /// `1 - rho_star`; taken from the gap solver when `rho_star > 0.999`.
    pub gap: f64,
    /// `|cubic(rho_star)|`.
    pub residual: f64,
    /// `| |step(rho_star)| - rho_star |`.
    pub recursion_residual: f64,
}

pub fn cubic_coeffs(params: &ChannelParams) -> CubicCoeffs {
    let t = Terms::new(params);
    let (p, root, s12) = (t.p, t.root, t.s12);
    let vsum = t.v1 + t.v2;
    let a = -2.0 * s12 / p - (p + vsum + t.rz * s12) / root - 2.0 * t.v1 * t.v2 / p / root;
    let b = -1.0 - vsum / p - t.rz * vsum / root - s12 * vsum / p / root;
    let c = (p + vsum - t.rz * s12) / root;
    CubicCoeffs { a, b, c }
}

pub fn gap_cubic_coeffs(params: &ChannelParams) -> GapCubicCoeffs {
    let t = Terms::new(params);
    let (p, root, s12, rz) = (t.p, t.root, t.s12, t.rz);
    let vsum = t.v1 + t.v2;
    let lambda2 = 3.0 - 2.0 * s12 / p - (p + vsum + rz * s12) / root - 2.0 * t.v1 * t.v2 / p / root;
    let lambda1 = -2.0 * t.root_gap
        + ((2.0 + rz) * t.v1 + (2.0 + rz) * t.v2 + 2.0 * rz * s12) / root
        + (vsum + 4.0 * s12) / p
        + s12 * (t.v1 + 4.0 * s12 + t.v2) / p / root;
    let sum_sq = t.v1 + 2.0 * s12 + t.v2;
    // 1 + rz P / root, with P / root = 1 - root_gap
    let corr = (1.0 + rz) - rz * t.root_gap;
    let lambda0 = -sum_sq / p * corr - s12 * sum_sq / p / root;
    GapCubicCoeffs { lambda0, lambda1, lambda2 }
}

fn validate_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::param("tol", "must lie in (0, 1e-6]"));
    }
    Ok(())
}

/// Bisect a sign change of `f` on `[lo, hi]` until `done(lo, hi)` or the
/// bracket stops shrinking.
fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, done: impl Fn(f64, f64) -> bool) -> f64 {
    let mut f_lo = f(lo);
    while !done(lo, hi) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Roots of `f` found by scanning the given grid for sign changes.
fn scan_roots<F: Fn(f64) -> f64>(f: &F, grid: &[f64], done: impl Fn(f64, f64) -> bool + Copy) -> Vec<f64> {
    let mut roots = Vec::new();
    let mut prev = (grid[0], f(grid[0]));
    if prev.1 == 0.0 {
        roots.push(prev.0);
    }
    for &x in &grid[1..] {
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
        } else if prev.1 != 0.0 && (prev.1 < 0.0) != (fx < 0.0) {
            roots.push(bisect(f, prev.0, x, done));
        }
        prev = (x, fx);
    }
    roots
}

fn uniform_grid() -> Vec<f64> {
    (0..=SCAN_INTERVALS).map(|i| i as f64 / SCAN_INTERVALS as f64).collect()
}

/// Uniform grid on `[0, 1]` whose first cell is refined geometrically down
/// to the subnormal range, so roots at `g ~ 1/P` are still bracketed.
fn gap_grid() -> Vec<f64> {
    let mut grid = Vec::with_capacity(SCAN_INTERVALS + 1100);
    grid.push(0.0);
    let first = 1.0 / SCAN_INTERVALS as f64;
    let mut x = first;
    let mut tail = Vec::new();
    while x > 1e-300 {
        x *= 0.5;
        tail.push(x);
    }
    grid.extend(tail.into_iter().rev());
    grid.extend((1..=SCAN_INTERVALS).map(|i| i as f64 / SCAN_INTERVALS as f64));
    grid
}

fn gap_roots(coeffs: &GapCubicCoeffs) -> Vec<f64> {
    let f = |g: f64| coeffs.eval(g);
    scan_roots(&f, &gap_grid(), |lo, hi| hi - lo <= 4.0 * f64::EPSILON * hi)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    rho: f64,
    gap: f64,
    residual: f64,
    recursion_residual: f64,
}

/// Smallest recursion residual wins; near-ties go to the largest `rho`.
fn select(candidates: &[Candidate]) -> Result<Candidate> {
    let best = candidates.iter().map(|c| c.recursion_residual).fold(f64::INFINITY, f64::min);
    if best.is_nan() || best > RECURSION_TOL {
        return Err(Error::NoFixedPoint { best_residual: best });
    }
    let chosen = candidates.iter().filter(|c| c.recursion_residual <= best + TIE_TOL).fold(
        None::<Candidate>,
        |acc, c| match acc {
            Some(a) if a.rho >= c.rho => Some(a),
            _ => Some(*c),
        },
    );
    chosen.ok_or(Error::NoFixedPoint { best_residual: best })
}

fn gap_candidates(params: &ChannelParams, tol: f64, below: f64) -> Vec<Candidate> {
    let t = Terms::new(params);
    let coeffs = gap_cubic_coeffs(params);
    let limit = tol * coeffs.scale();
    gap_roots(&coeffs)
        .into_iter()
        .filter(|&g| g < below)
        .map(|g| Candidate {
            rho: 1.0 - g,
            gap: g,
            residual: coeffs.eval(g).abs(),
            recursion_residual: fixed_point_residual(&t, g),
        })
        .filter(|c| c.residual <= limit)
        .collect()
}

/// Solve for the fixed-point correlation `rho*` in `[0, 1]`.
pub fn solve_fixed_point(params: &ChannelParams, tol: f64) -> Result<FixedPoint> {
    validate_tol(tol)?;
    let t = Terms::new(params);
    let coeffs = cubic_coeffs(params);
    let f = |r: f64| coeffs.eval(r);
    let limit = tol * coeffs.scale();

    let mut candidates: Vec<Candidate> = scan_roots(&f, &uniform_grid(), |lo, hi| hi - lo <= BISECTION_WIDTH)
        .into_iter()
        .filter(|&r| r <= GAP_SWITCH)
        .map(|r| Candidate {
            rho: r,
            gap: 1.0 - r,
            residual: coeffs.eval(r).abs(),
            recursion_residual: fixed_point_residual(&t, 1.0 - r),
        })
        .filter(|c| c.residual <= limit)
        .collect();
    candidates.extend(gap_candidates(params, tol, 1.0 - GAP_SWITCH));

    let chosen = select(&candidates)?;
    Ok(FixedPoint {
        rho_star: chosen.rho,
        gap: chosen.gap,
        residual: chosen.residual,
        recursion_residual: chosen.recursion_residual,
    })
}

/// Solve for `g = 1 - rho*` directly in the gap form.
pub fn solve_gap(params: &ChannelParams, tol: f64) -> Result<f64> {
    validate_tol(tol)?;
    let candidates = gap_candidates(params, tol, f64::INFINITY);
    select(&candidates).map(|c| c.gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::recursion::{step_error_state, ErrorState};
    use crate::model::NoiseSpec;
    use libm::{fabs, pow};

    fn params(p: f64, s1: f64, s2: f64, rz: f64) -> ChannelParams {
        ChannelParams::new(p, NoiseSpec::new(s1, s2, rz).unwrap()).unwrap()
    }

    #[test]
    fn coefficients_at_p10() {
        let c = cubic_coeffs(&params(10.0, 1.0, 1.0, -1.0));
        // a = -0.2 - 11/11 - 2/110, b = -1 - 0.2 + 2/11 - 2/110, c = 13/11
        assert!(fabs(c.a - (-0.2 - 1.0 - 2.0 / 110.0)) < 1e-15);
        assert!(fabs(c.b - (-1.2 + 2.0 / 11.0 - 2.0 / 110.0)) < 1e-15);
        assert!(fabs(c.c - 13.0 / 11.0) < 1e-15);
        assert!(fabs(c.a + 1.21818) < 1e-5 && fabs(c.b + 1.03636) < 1e-5);
    }

    #[test]
    fn coefficients_tend_to_limit_cubic() {
        for &(s1, s2) in &[(1.0, 1.0), (0.5, 2.0), (3.0, 1.5)] {
            let c = cubic_coeffs(&params(1e12, s1, s2, -1.0));
            assert!(fabs(c.a + 1.0) < 1e-6 && fabs(c.b + 1.0) < 1e-6 && fabs(c.c - 1.0) < 1e-6);
        }
    }

    #[test]
    fn constant_term_positive_for_antipodal_noise() {
        for &p in &[1e-3, 0.1, 1.0, 10.0, 1e5, 1e12] {
            for &(s1, s2) in &[(1.0, 1.0), (0.2, 5.0)] {
                let c = cubic_coeffs(&params(p, s1, s2, -1.0)).c;
                let t = Terms::new(&params(p, s1, s2, -1.0));
                let want = (p + s1 * s1 + s2 * s2 + s1 * s2) / t.root;
                assert!(c > 0.0 && fabs(c - want) <= 1e-15 * want);
            }
        }
    }

    #[test]
    fn fixed_point_at_p10() {
        let fp = solve_fixed_point(&params(10.0, 1.0, 1.0, -1.0), DEFAULT_TOL).unwrap();
        assert!(fabs(fp.rho_star - 0.889399164116) < 1e-9, "{}", fp.rho_star);
        assert!(fabs(fp.rho_star + fp.gap - 1.0) < 1e-15);
        assert!(fp.recursion_residual < 1e-12);
        let g = solve_gap(&params(10.0, 1.0, 1.0, -1.0), DEFAULT_TOL).unwrap();
        assert!(fabs(g - 0.110600835884) < 1e-9);
    }

    #[test]
    fn fixed_point_alternates_in_sign() {
        let pr = params(10.0, 1.0, 1.0, -1.0);
        let fp = solve_fixed_point(&pr, DEFAULT_TOL).unwrap();
        let next = step_error_state(&ErrorState::new(1.0, 1.0, fp.rho_star, 2).unwrap(), &pr).unwrap();
        assert!(fabs(fabs(next.rho) - fp.rho_star) < 1e-9);
        assert!(next.rho < 0.0);
    }

    #[test]
    fn high_power_gap_stays_positive() {
        let pr = params(1e10, 1.0, 1.0, -1.0);
        let fp = solve_fixed_point(&pr, DEFAULT_TOL).unwrap();
        assert!(fp.gap > 0.0 && fp.gap < 1e-6);
        assert!(fabs(1.0 - fp.rho_star) < 1e-6);
        // g P tends to 1.2360679...; see the asymptotics tests.
        assert!(fabs(fp.gap * 1e10 - 1.236068) < 1e-5);
    }

    #[test]
    fn uncorrelated_noise_keeps_a_margin() {
        let fp = solve_fixed_point(&params(1e6, 1.0, 1.0, 0.0), DEFAULT_TOL).unwrap();
        assert!(1.0 - fp.rho_star > 1e-3);
    }

    #[test]
    fn uncorrelated_gap_decays_like_inverse_sqrt_power() {
        // The gap keeps shrinking (about sqrt(2/P)); it does not level off.
        let g = solve_gap(&params(1e10, 1.0, 1.0, 0.0), DEFAULT_TOL).unwrap();
        assert!(fabs(g - 1.41419856e-5) < 1e-12, "{g}");
    }

    #[test]
    fn scaled_gap_decreases_for_antipodal_noise() {
        let mut prev = f64::INFINITY;
        for e in 7..=10 {
            let p = pow(10.0, e as f64);
            let g = solve_gap(&params(p, 1.0, 1.0, -1.0), DEFAULT_TOL).unwrap();
            let scaled = pow(p, 0.8) * g;
            assert!(scaled < prev);
            prev = scaled;
        }
    }

    #[test]
    fn shifted_form_matches_gap_form() {
        let pr = params(7.5, 0.8, 1.9, 0.35);
        let s = cubic_coeffs(&pr).shifted();
        let l = gap_cubic_coeffs(&pr);
        assert!(fabs(s[0] - l.lambda0) < 1e-14);
        assert!(fabs(s[1] - l.lambda1) < 1e-14);
        assert!(fabs(s[2] - l.lambda2) < 1e-14);
        assert_eq!(s[3], -1.0);
    }

    #[test]
    fn tolerance_is_validated() {
        let pr = params(10.0, 1.0, 1.0, -1.0);
        assert!(solve_fixed_point(&pr, 0.0).is_err());
        assert!(solve_fixed_point(&pr, 1e-3).is_err());
        assert!(solve_gap(&pr, -1.0).is_err());
    }

    #[test]
    fn selection_prefers_residual_then_largest_root() {
        let c = |rho, rr| Candidate { rho, gap: 1.0 - rho, residual: 0.0, recursion_residual: rr };
        assert_eq!(select(&[c(0.3, 1e-14), c(0.8, 1e-15)]).unwrap().rho, 0.8);
        assert_eq!(select(&[c(0.3, 1e-14), c(0.8, 1e-7)]).unwrap().rho, 0.3);
        assert!(matches!(select(&[c(0.3, 1e-3)]), Err(Error::NoFixedPoint { .. })));
        assert!(select(&[]).is_err());
    }
}
