//! Channel parameters and exact realisations of the broadcast and
//! interference channels.
//!
//! Noise pairs with `|rho_z| = 1` are generated from a single Gaussian draw so
//! that perfect (anti-)correlation holds sample by sample rather than only in
//! distribution.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::float::sqrt;

/// Index of a receiver in the two-user channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Receiver {
    One,
    Two,
}

impl Receiver {
    pub fn other(self) -> Receiver {
        match self {
            Receiver::One => Receiver::Two,
            Receiver::Two => Receiver::One,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Receiver::One => 1,
            Receiver::Two => 2,
        }
    }

    pub fn from_index(index: u8) -> Result<Receiver> {
        match index {
            1 => Ok(Receiver::One),
            2 => Ok(Receiver::Two),
            _ => Err(Error::param("receiver", "must be 1 or 2")),
        }
    }
}

/// Standard deviations and correlation coefficient of the receiver noises.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    sigma1: f64,
    sigma2: f64,
    rho_z: f64,
}

impl NoiseSpec {
    pub fn new(sigma1: f64, sigma2: f64, rho_z: f64) -> Result<NoiseSpec> {
        if !(sigma1.is_finite() && sigma1 > 0.0) {
            return Err(Error::param("sigma1", "must be positive and finite"));
        }
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::param("sigma2", "must be positive and finite"));
        }
        if !(-1.0..=1.0).contains(&rho_z) {
            return Err(Error::param("rho_z", "must lie in [-1, 1]"));
        }
        let spec = NoiseSpec { sigma1, sigma2, rho_z };
        // 2x2 covariance: PSD iff diagonal >= 0 and det >= 0.
        let [[k11, k12], [_, k22]] = spec.covariance();
        if k11 * k22 - k12 * k12 < -1e-12 * k11 * k22 {
            return Err(Error::NumericalIntegrity("noise covariance is not positive semi-definite"));
        }
        Ok(spec)
    }

    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn rho_z(&self) -> f64 {
        self.rho_z
    }

    pub fn sigma(&self, receiver: Receiver) -> f64 {
        match receiver {
            Receiver::One => self.sigma1,
            Receiver::Two => self.sigma2,
        }
    }

    /// Noise covariance matrix `K`.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        let off = self.rho_z * self.sigma1 * self.sigma2;
        [[self.sigma1 * self.sigma1, off], [off, self.sigma2 * self.sigma2]]
    }

    /// Whether the two noises are perfectly correlated or anti-correlated.
    pub fn is_degenerate(&self) -> bool {
        self.rho_z.abs() == 1.0
    }

    /// Factor with `z2 = factor * z1` in the degenerate case.
    fn degenerate_scale(&self) -> f64 {
        self.rho_z * (self.sigma2 / self.sigma1)
    }
}

/// Average block power together with the noise statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    power: f64,
    noise: NoiseSpec,
}

impl ChannelParams {
    pub fn new(power: f64, noise: NoiseSpec) -> Result<ChannelParams> {
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::param("power", "must be positive and finite"));
        }
        Ok(ChannelParams { power, noise })
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }
}

/// Key of an independent random stream: a master seed and a per-trial stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> RngSpec {
        RngSpec { master_seed, stream_id }
    }

    /// ChaCha8 keyed by the master seed, positioned on stream `stream_id`.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Draw one jointly Gaussian noise pair `(z1, z2)` with covariance `K`.
pub fn sample_noise_pair<R: Rng + ?Sized>(spec: &NoiseSpec, rng: &mut R) -> (f64, f64) {
    let u: f64 = StandardNormal.sample(rng);
    let z1 = spec.sigma1 * u;
    if spec.is_degenerate() {
        return (z1, spec.degenerate_scale() * z1);
    }
    let v: f64 = StandardNormal.sample(rng);
    let rho = spec.rho_z;
    let z2 = spec.sigma2 * (rho * u + sqrt(1.0 - rho * rho) * v);
    (z1, z2)
}

/// Outputs of the broadcast channel for input `x`.
#[inline]
pub fn broadcast_output(x: f64, z1: f64, z2: f64) -> (f64, f64) {
    (x + z1, x + z2)
}

/// Outputs of the unit-gain interference channel for inputs `x1`, `x2`.
#[inline]
pub fn interference_output(x1: f64, x2: f64, z1: f64, z2: f64) -> (f64, f64) {
    let x = x1 + x2;
    (x + z1, x + z2)
}

/// Recover the output of the receiver that is not fed back, from the channel
/// input and the fed-back output. Only possible when `|rho_z| = 1`.
pub fn reconstruct_other_output(x: f64, y_observed: f64, observed: Receiver, spec: &NoiseSpec) -> Result<f64> {
    if !spec.is_degenerate() {
        return Err(Error::Unsupported("output reconstruction requires perfectly correlated noise (|rho_z| = 1)"));
    }
    let z_observed = y_observed - x;
    let z_other = match observed {
        Receiver::One => spec.degenerate_scale() * z_observed,
        Receiver::Two => spec.rho_z * (spec.sigma1 / spec.sigma2) * z_observed,
    };
    Ok(x + z_other)
}
