//! Monte Carlo realisation of the feedback coding scheme.

mod campaign;
mod coder;
mod message;
mod schedule;
mod trial;

pub use campaign::*;
pub use coder::*;
pub use message::*;
pub use schedule::*;
pub use trial::*;
