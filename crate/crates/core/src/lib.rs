//! Linear feedback coding for the two-user Gaussian broadcast channel.
//!
//! The crate is `no_std` (it needs `alloc`) and is split into three layers:
//!
//! * [`model`]: noise statistics, channel realisations and seeded random streams,
//! * [`analysis`]: the closed-form error-moment recursions, the fixed-point
//!   cubic, achievable rates, high-power asymptotics and pre-log classification,
//! * [`simulate`]: a Monte Carlo implementation of the coding scheme for the
//!   broadcast channel, its interference-channel variant and single-output feedback.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod error;
mod float;
pub mod model;
pub mod simulate;

pub use error::{Error, Result};
pub use model::{ChannelParams, NoiseSpec, Receiver, RngSpec};
