use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

/// Coarse classification used by callers that need to map failures onto
/// process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: violated type invariant or operation precondition.
    Invalid,
    /// An iterative method failed or a numerical self-check tripped.
    Numerical,
    /// The orbit arithmetic cannot guarantee the requested number of steps.
    Precision,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("expanding map needs base q >= 2, got q = {0}")]
    InvalidBase(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(
        "precision budget exceeded: {steps} steps requested but base {q} with max frequency \
         {max_freq} allows at most {budget} steps of the {bits}-bit orbit arithmetic"
    )]
    PrecisionBudget {
        steps: usize,
        budget: usize,
        q: u64,
        max_freq: u64,
        bits: u32,
    },

    #[error("no convergence after {iterations} iterations (last change {last_change:e}, residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        last_change: f64,
        residual: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidBase(_) | Error::InvalidArgument(_) | Error::Precondition(_) => {
                ErrorKind::Invalid
            }
            Error::PrecisionBudget { .. } => ErrorKind::Precision,
            Error::NoConvergence { .. } | Error::Numerical(_) => ErrorKind::Numerical,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
