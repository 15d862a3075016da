//! Monte Carlo campaigns: many trials folded into moment and error statistics.
//!
//! Trials are grouped into fixed chunks of [`CHUNK_TRIALS`] consecutive stream
//! ids. A chunk's sums depend only on its index, and chunks are always folded
//! in index order, so a parallel driver reproduces the sequential result bit
//! for bit.

use alloc::vec;
use alloc::vec::Vec;

use crate::analysis::{solve_fixed_point, ErrorState, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::float::sqrt;
use crate::model::{ChannelParams, RngSpec};

use super::message::MessageConfig;
use super::schedule::InitMode;
use super::trial::{Mode, Scheme, TrialRecord};

/// Trials per chunk.
pub const CHUNK_TRIALS: u64 = 1000;
/// Smallest campaign accepted.
pub const MIN_TRIALS: u64 = 100;
/// Two-sided 95% normal quantile used for the Wilson interval.
const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct StepSums {
    // errors normalised by the analytic standard deviations
    u1: f64,
    u2: f64,
    u1u1: f64,
    u2u2: f64,
    u1u2: f64,
    // outputs normalised by sqrt(P + sigma^2), and their products with the new errors
    v1: f64,
    v2: f64,
    v1v1: f64,
    v2v2: f64,
    u1v1: f64,
    u2v2: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct PowerSums {
    x2: f64,
    x4: f64,
    tx1: f64,
    tx2: f64,
}

/// Mergeable running sums over a set of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct Accumulator {
    trials: u64,
    errors_pair: u64,
    errors1: u64,
    errors2: u64,
    block_power: f64,
    steps: Vec<StepSums>,
    power: Vec<PowerSums>,
}

impl Accumulator {
    pub fn new(block_length: u32) -> Accumulator {
        let n = block_length as usize;
        Accumulator {
            trials: 0,
            errors_pair: 0,
            errors1: 0,
            errors2: 0,
            block_power: 0.0,
            steps: vec![StepSums::default(); n - 1],
            power: vec![PowerSums::default(); n],
        }
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    /// Add `other` into `self`. Floating-point sums depend on the order of
    /// merges; fold chunks in index order for reproducible results.
    pub fn merge(&mut self, other: &Accumulator) {
        self.trials += other.trials;
        self.errors_pair += other.errors_pair;
        self.errors1 += other.errors1;
        self.errors2 += other.errors2;
        self.block_power += other.block_power;
        for (a, b) in self.steps.iter_mut().zip(&other.steps) {
            a.u1 += b.u1;
            a.u2 += b.u2;
            a.u1u1 += b.u1u1;
            a.u2u2 += b.u2u2;
            a.u1u2 += b.u1u2;
            a.v1 += b.v1;
            a.v2 += b.v2;
            a.v1v1 += b.v1v1;
            a.v2v2 += b.v2v2;
            a.u1v1 += b.u1v1;
            a.u2v2 += b.u2v2;
        }
        for (a, b) in self.power.iter_mut().zip(&other.power) {
            a.x2 += b.x2;
            a.x4 += b.x4;
            a.tx1 += b.tx1;
            a.tx2 += b.tx2;
        }
    }

    fn add(&mut self, rec: &TrialRecord, scheme: &Scheme) {
        let sched = scheme.schedule();
        let params = scheme.params();
        let p = params.power();
        let sd_y1 = sqrt(p + params.noise().sigma1() * params.noise().sigma1());
        let sd_y2 = sqrt(p + params.noise().sigma2() * params.noise().sigma2());
        self.trials += 1;
        self.errors1 += u64::from(rec.decoded.0 != rec.messages.0);
        self.errors2 += u64::from(rec.decoded.1 != rec.messages.1);
        self.errors_pair += u64::from(!rec.success);
        self.block_power += rec.block_power();
        for (j, (&(e1, e2), s)) in rec.errors.iter().zip(self.steps.iter_mut()).enumerate() {
            let k = j as u32 + 2;
            let m = sched.moments(k).unwrap_or(sched.initial);
            let u1 = e1 / sqrt(m.alpha1);
            let u2 = e2 / sqrt(m.alpha2);
            s.u1 += u1;
            s.u2 += u2;
            s.u1u1 += u1 * u1;
            s.u2u2 += u2 * u2;
            s.u1u2 += u1 * u2;
            if k >= 3 {
                let (y1, y2) = rec.outputs[k as usize - 1];
                let (v1, v2) = (y1 / sd_y1, y2 / sd_y2);
                s.v1 += v1;
                s.v2 += v2;
                s.v1v1 += v1 * v1;
                s.v2v2 += v2 * v2;
                s.u1v1 += u1 * v1;
                s.u2v2 += u2 * v2;
            }
        }
        for (t, (&x, s)) in rec.inputs.iter().zip(self.power.iter_mut()).enumerate() {
            let x2 = x * x;
            s.x2 += x2;
            s.x4 += x2 * x2;
            if let Some(split) = &rec.transmitter_inputs {
                let (a, b) = split[t];
                s.tx1 += a * a;
                s.tx2 += b * b;
            }
        }
    }
}

/// Empirical and analytic moments after `step_index` channel uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMoments {
    pub step_index: u32,
    pub mean1: f64,
    pub mean2: f64,
    pub var1: f64,
    pub var2: f64,
    pub corr: f64,
    pub analytic: ErrorState,
    pub z_mean1: f64,
    pub z_mean2: f64,
    pub z_var1: f64,
    pub z_var2: f64,
    pub z_corr: f64,
    /// z-scores of `Corr(eps_nu, Y_nu)` after the update; absent at `k = 2`.
    pub z_orth: Option<(f64, f64)>,
}

impl StepMoments {
    pub fn max_abs_z(&self) -> f64 {
        [self.z_mean1, self.z_mean2, self.z_var1, self.z_var2, self.z_corr].iter().fold(0.0, |m: f64, z| m.max(z.abs()))
    }
}

/// Empirical power of the input at channel use `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerStat {
    pub t: u32,
    pub mean: f64,
    /// z-score against `P`; feedback steps only.
    pub z: Option<f64>,
    /// Mean power of each transmitter, interference mode only.
    pub transmitters: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub trials: u64,
    pub mode: Mode,
    pub steps: Vec<StepMoments>,
    pub power: Vec<PowerStat>,
    /// Average of `x_t^2` over all symbols of all blocks.
    pub mean_power: f64,
    pub block_errors: u64,
    pub errors1: u64,
    pub errors2: u64,
    pub block_error_rate: f64,
    /// Wilson 95% interval for the block error rate.
    pub block_error_ci: (f64, f64),
    pub rho_star: f64,
    /// `| |rho_n| - rho* |` for the analytic schedule.
    pub analytic_rho_distance: f64,
    /// `| |r_n| - rho* |` for the empirical correlation.
    pub empirical_rho_distance: f64,
}

impl McSummary {
    /// Largest moment z-score over all steps.
    pub fn max_moment_z(&self) -> f64 {
        self.steps.iter().fold(0.0, |m, s| m.max(s.max_abs_z()))
    }

    pub fn max_orthogonality_z(&self) -> f64 {
        self.steps.iter().filter_map(|s| s.z_orth).fold(0.0, |m: f64, (a, b)| m.max(a.abs()).max(b.abs()))
    }

    pub fn max_power_z(&self) -> f64 {
        self.power.iter().filter_map(|s| s.z).fold(0.0, |m: f64, z| m.max(z.abs()))
    }
}

/// Wilson score interval at 95% for `k` successes out of `n`.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let ph = k as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let centre = (ph + z2 / (2.0 * nf)) / denom;
    let half = Z95 * sqrt(ph * (1.0 - ph) / nf + z2 / (4.0 * nf * nf)) / denom;
    // the exact bounds at the extremes are 0 and 1; rounding would leave dust
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// A configured campaign. Chunks can be evaluated in any order or concurrently.
#[derive(Debug, Clone)]
pub struct Campaign {
    scheme: Scheme,
    mode: Mode,
    trials: u64,
    master_seed: u64,
    rho_star: f64,
}

impl Campaign {
    pub fn new(
        config: MessageConfig,
        params: ChannelParams,
        mode: Mode,
        init: InitMode,
        trials: u64,
        master_seed: u64,
    ) -> Result<Campaign> {
        if trials < MIN_TRIALS {
            return Err(Error::param("trials", "must be at least 100"));
        }
        if matches!(mode, Mode::LimitedFeedback(_)) && !params.noise().is_degenerate() {
            return Err(Error::Unsupported("limited feedback requires |rho_z| = 1"));
        }
        let scheme = Scheme::new(config, params, init)?;
        let rho_star = solve_fixed_point(&params, DEFAULT_TOL)?.rho_star;
        Ok(Campaign { scheme, mode, trials, master_seed, rho_star })
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn chunk_count(&self) -> u64 {
        self.trials.div_ceil(CHUNK_TRIALS)
    }

    pub fn empty(&self) -> Accumulator {
        Accumulator::new(self.scheme.config().block_length())
    }

    /// Sums over trials `chunk * CHUNK_TRIALS ..` (stream id = trial index).
    pub fn run_chunk(&self, chunk: u64) -> Result<Accumulator> {
        let start = chunk * CHUNK_TRIALS;
        let end = (start + CHUNK_TRIALS).min(self.trials);
        let mut acc = self.empty();
        for id in start..end {
            let rec = self.scheme.run(self.mode, RngSpec::new(self.master_seed, id))?;
            acc.add(&rec, &self.scheme);
        }
        Ok(acc)
    }

    /// Fold chunk results, which must be supplied in chunk order.
    pub fn merge_chunks<I: IntoIterator<Item = Accumulator>>(&self, chunks: I) -> Accumulator {
        let mut acc = self.empty();
        for c in chunks {
            acc.merge(&c);
        }
        acc
    }

    pub fn run(&self) -> Result<McSummary> {
        let chunks = (0..self.chunk_count()).map(|c| self.run_chunk(c)).collect::<Result<Vec<_>>>()?;
        self.summarize(&self.merge_chunks(chunks))
    }

    pub fn summarize(&self, acc: &Accumulator) -> Result<McSummary> {
        if acc.trials < 2 {
            return Err(Error::param("trials", "need at least two trials to summarise"));
        }
        let n = acc.trials as f64;
        let sched = self.scheme.schedule();
        let p = self.scheme.params().power();
        let var_of = |s: f64, ss: f64| ((ss - s * s / n) / (n - 1.0)).max(0.0);
        let corr_of = |a: f64, aa: f64, b: f64, bb: f64, ab: f64| {
            let cov = ab / n - (a / n) * (b / n);
            let d = sqrt((aa / n - (a / n) * (a / n)) * (bb / n - (b / n) * (b / n)));
            if d > 0.0 {
                cov / d
            } else {
                0.0
            }
        };

        let mut steps = Vec::with_capacity(acc.steps.len());
        for (j, s) in acc.steps.iter().enumerate() {
            let k = j as u32 + 2;
            let m = sched.moments(k).unwrap_or(sched.initial);
            let (mu1, mu2) = (s.u1 / n, s.u2 / n);
            let (vu1, vu2) = (var_of(s.u1, s.u1u1), var_of(s.u2, s.u2u2));
            let r = corr_of(s.u1, s.u1u1, s.u2, s.u2u2, s.u1u2);
            let var_se = sqrt(2.0 / (n - 1.0));
            let one_minus = (1.0 - m.rho * m.rho).max(1e-12);
            let z_orth = (k >= 3).then(|| {
                (
                    corr_of(s.u1, s.u1u1, s.v1, s.v1v1, s.u1v1) * sqrt(n),
                    corr_of(s.u2, s.u2u2, s.v2, s.v2v2, s.u2v2) * sqrt(n),
                )
            });
            steps.push(StepMoments {
                step_index: k,
                mean1: mu1 * sqrt(m.alpha1),
                mean2: mu2 * sqrt(m.alpha2),
                var1: vu1 * m.alpha1,
                var2: vu2 * m.alpha2,
                corr: r,
                analytic: m,
                z_mean1: mu1 * sqrt(n),
                z_mean2: mu2 * sqrt(n),
                z_var1: (vu1 - 1.0) / var_se,
                z_var2: (vu2 - 1.0) / var_se,
                z_corr: (r - m.rho) * sqrt(n) / one_minus,
                z_orth,
            });
        }

        let power = acc
            .power
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let t = i as u32 + 1;
                let mean = s.x2 / n;
                let z = (t >= 3).then(|| {
                    let sd = sqrt(var_of(s.x2, s.x4));
                    if sd > 0.0 {
                        (mean - p) / (sd / sqrt(n))
                    } else {
                        0.0
                    }
                });
                let transmitters = (self.mode == Mode::Interference).then(|| (s.tx1 / n, s.tx2 / n));
                PowerStat { t, mean, z, transmitters }
            })
            .collect();

        let last = steps.last().map(|s| (s.analytic.rho, s.corr)).unwrap_or((0.0, 0.0));
        Ok(McSummary {
            trials: acc.trials,
            mode: self.mode,
            steps,
            power,
            mean_power: acc.block_power / n,
            block_errors: acc.errors_pair,
            errors1: acc.errors1,
            errors2: acc.errors2,
            block_error_rate: acc.errors_pair as f64 / n,
            block_error_ci: wilson_interval(acc.errors_pair, acc.trials),
            rho_star: self.rho_star,
            analytic_rho_distance: (last.0.abs() - self.rho_star).abs(),
            empirical_rho_distance: (last.1.abs() - self.rho_star).abs(),
        })
    }
}

pub fn run_broadcast_campaign(
    config: MessageConfig,
    params: ChannelParams,
    trials: u64,
    master_seed: u64,
) -> Result<McSummary> {
    Campaign::new(config, params, Mode::Broadcast, InitMode::Natural, trials, master_seed)?.run()
}
