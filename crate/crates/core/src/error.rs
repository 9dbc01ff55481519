//! Error type shared by all modules.

use crate::quantizer::LloydMaxCodebook;

/// Failure modes of the library. Solvers that iterate report how far they got;
/// everything else is an argument that violated a documented precondition.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Lloyd fixed-point iteration hit the iteration cap. Carries the last
    /// iterate so callers can inspect or accept it.
    #[error("quantizer design did not converge after {iterations} iterations (last relative distortion change {residual:.3e})")]
    DesignNotConverged {
        iterations: usize,
        residual: f64,
        last: Box<LloydMaxCodebook>,
    },

    /// A bisection search on a budget equation hit the iteration cap.
    #[error("bisection did not converge after {iterations} iterations (budget residual {residual:.3e})")]
    BisectionNotConverged { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
