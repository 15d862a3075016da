use thiserror::Error;

/// Errors raised by the channel model, the analysis routines and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied value violates a documented precondition.
    #[error("invalid parameter `{field}`: {reason}")]
    Parameter { field: &'static str, reason: &'static str },

    /// The request is well-formed but the configuration does not support it,
    /// e.g. output reconstruction with imperfectly correlated noise.
    #[error("unsupported configuration: {0}")]
    Unsupported(&'static str),

    /// A message set with a single element has zero variance and cannot be normalised.
    #[error("degenerate message set for receiver {receiver}: a single level carries no information")]
    DegenerateMessage { receiver: u8 },

    /// No root of the fixed-point cubic in [0, 1] survived the recursion-residual check.
    #[error("no fixed point in [0, 1] (best recursion residual {best_residual:e})")]
    NoFixedPoint { best_residual: f64 },

    /// An internal invariant failed; indicates a bug rather than bad input.
    #[error("numerical integrity failure: {0}")]
    NumericalIntegrity(&'static str),
}

impl Error {
    pub(crate) const fn param(field: &'static str, reason: &'static str) -> Self {
        Error::Parameter { field, reason }
    }

    /// True for errors caused by invalid user input.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parameter { .. } | Error::Unsupported(_) | Error::DegenerateMessage { .. })
    }
}

pub type Result<T> = core::result::Result<T, Error>;
