//! End-to-end trials: message draw, dedicated uses, feedback steps, decoding.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{
    broadcast_output, interference_output, reconstruct_other_output, sample_noise_pair, ChannelParams, Receiver,
    RngSpec,
};

use super::coder::{encode_init, initial_estimation_error, receiver_update};
use super::message::{decode_offset, map_message, message_point_variance, MessageConfig};
use super::schedule::{initial_state, lmmse_coefficient_schedule, CoefficientSchedule, InitMode};

/// Which channel and feedback arrangement a trial runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// One encoder sees both outputs.
    #[default]
    Broadcast,
    /// Two transmitters, each with feedback from its own receiver only.
    Interference,
    /// One encoder that sees a single output and reconstructs the other.
    LimitedFeedback(Receiver),
}

/// Everything recorded about one block.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub messages: (u128, u128),
    pub decoded: (u128, u128),
    /// Channel input at `t = 1..=n` (the sum of both transmitters in interference mode).
    pub inputs: Vec<f64>,
    /// Per-transmitter inputs, interference mode only.
    pub transmitter_inputs: Option<Vec<(f64, f64)>>,
    pub noise: Vec<(f64, f64)>,
    pub outputs: Vec<(f64, f64)>,
    /// Receiver errors `(eps1, eps2)` after `k = 2..=n` channel uses.
    pub errors: Vec<(f64, f64)>,
    pub success: bool,
}

impl TrialRecord {
    /// Block power `(1/n) sum x_t^2`.
    pub fn block_power(&self) -> f64 {
        self.inputs.iter().map(|x| x * x).sum::<f64>() / self.inputs.len() as f64
    }
}

/// A configured scheme: level counts, message-point variances and the shared
/// coefficient schedule. Cheap to reuse across any number of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    config: MessageConfig,
    params: ChannelParams,
    levels: (u128, u128),
    variances: (f64, f64),
    schedule: CoefficientSchedule,
}

impl Scheme {
    pub fn new(config: MessageConfig, params: ChannelParams, init: InitMode) -> Result<Scheme> {
        let levels = config.level_counts();
        for (receiver, l) in [(1, levels.0), (2, levels.1)] {
            if l < 2 {
                return Err(Error::DegenerateMessage { receiver });
            }
        }
        let variances = (message_point_variance(levels.0), message_point_variance(levels.1));
        let start = initial_state(&params, variances.0, variances.1, init)?;
        let schedule = lmmse_coefficient_schedule(&params, start, config.block_length())?;
        Ok(Scheme { config, params, levels, variances, schedule })
    }

    pub fn config(&self) -> &MessageConfig {
        &self.config
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn levels(&self) -> (u128, u128) {
        self.levels
    }

    pub fn schedule(&self) -> &CoefficientSchedule {
        &self.schedule
    }

    pub fn run(&self, mode: Mode, rng: RngSpec) -> Result<TrialRecord> {
        if let Mode::LimitedFeedback(_) = mode {
            if !self.params.noise().is_degenerate() {
                return Err(Error::Unsupported("limited feedback requires |rho_z| = 1"));
            }
        }
        let mut rng = rng.rng();
        let n = self.config.block_length() as usize;
        let p = self.params.power();
        let noise_spec = *self.params.noise();

        let m1 = rng.random_range(1..=self.levels.0);
        let m2 = rng.random_range(1..=self.levels.1);
        let theta1 = map_message(m1, self.levels.0)?;
        let theta2 = map_message(m2, self.levels.1)?;
        let (x_first, x_second) = encode_init(&theta1, &theta2, &self.params)?;

        let mut inputs = Vec::with_capacity(n);
        let mut split = (mode == Mode::Interference).then(|| Vec::with_capacity(n));
        let mut noise = Vec::with_capacity(n);
        let mut outputs = Vec::with_capacity(n);
        let mut errors = Vec::with_capacity(n - 1);

        // Receiver errors, and the encoder-side copies the next inputs are built from.
        let (mut rx1, mut rx2) = (0.0, 0.0);
        let (mut tx1, mut tx2) = (0.0, 0.0);

        for t in 1..=n {
            let (x1, x2) = match t {
                1 => (x_first, 0.0),
                2 => (0.0, x_second),
                _ => {
                    let step = self.schedule.step(t as u32).ok_or(Error::NumericalIntegrity("schedule too short"))?;
                    (step.weight1 * tx1, step.weight2 * tx2)
                }
            };
            let (z1, z2) = sample_noise_pair(&noise_spec, &mut rng);
            let (x, (y1, y2)) = match mode {
                Mode::Interference => (x1 + x2, interference_output(x1, x2, z1, z2)),
                _ => {
                    let x = x1 + x2;
                    (x, broadcast_output(x, z1, z2))
                }
            };
            // What the encoder side learns about (y1, y2).
            let (f1, f2) = match mode {
                Mode::LimitedFeedback(Receiver::One) => {
                    (y1, reconstruct_other_output(x, y1, Receiver::One, &noise_spec)?)
                }
                Mode::LimitedFeedback(Receiver::Two) => {
                    (reconstruct_other_output(x, y2, Receiver::Two, &noise_spec)?, y2)
                }
                _ => (y1, y2),
            };
            match t {
                1 => {
                    rx1 = initial_estimation_error(y1, x, self.variances.0, p);
                    tx1 = initial_estimation_error(f1, x, self.variances.0, p);
                }
                2 => {
                    rx2 = initial_estimation_error(y2, x, self.variances.1, p);
                    tx2 = initial_estimation_error(f2, x, self.variances.1, p);
                }
                _ => {
                    let step = self.schedule.step(t as u32).ok_or(Error::NumericalIntegrity("schedule too short"))?;
                    rx1 = receiver_update(rx1, y1, step.coeff1);
                    rx2 = receiver_update(rx2, y2, step.coeff2);
                    tx1 = receiver_update(tx1, f1, step.coeff1);
                    tx2 = receiver_update(tx2, f2, step.coeff2);
                }
            }
            inputs.push(x);
            if let Some(s) = split.as_mut() {
                s.push((x1, x2));
            }
            noise.push((z1, z2));
            outputs.push((y1, y2));
            if t >= 2 {
                errors.push((rx1, rx2));
            }
        }

        let decoded = (decode_offset(m1, rx1, self.levels.0), decode_offset(m2, rx2, self.levels.1));
        Ok(TrialRecord {
            messages: (m1, m2),
            decoded,
            inputs,
            transmitter_inputs: split,
            noise,
            outputs,
            errors,
            success: decoded == (m1, m2),
        })
    }
}

pub fn run_broadcast_trial(config: MessageConfig, params: ChannelParams, rng: RngSpec) -> Result<TrialRecord> {
    Scheme::new(config, params, InitMode::Natural)?.run(Mode::Broadcast, rng)
}

pub fn run_interference_trial(config: MessageConfig, params: ChannelParams, rng: RngSpec) -> Result<TrialRecord> {
    Scheme::new(config, params, InitMode::Natural)?.run(Mode::Interference, rng)
}

pub fn run_limited_feedback_trial(
    config: MessageConfig,
    params: ChannelParams,
    rng: RngSpec,
    fed_back: Receiver,
) -> Result<TrialRecord> {
    if !params.noise().is_degenerate() {
        return Err(Error::Unsupported("limited feedback requires |rho_z| = 1"));
    }
    Scheme::new(config, params, InitMode::Natural)?.run(Mode::LimitedFeedback(fed_back), rng)
}
