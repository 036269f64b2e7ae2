use thiserror::Error;

/// Error type shared by all solver modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CapacityError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("could not bracket the Lagrange multiplier: {0}")]
    Bracket(String),

    #[error("solver did not converge: {message} (best value {best})")]
    NonConvergence { message: String, best: f64 },

    #[error("quadrature did not converge on [{a}, {b}]: estimate {value}, error {error}")]
    Quadrature { a: f64, b: f64, value: f64, error: f64 },

    #[error("capacity is unbounded: {0}")]
    Unbounded(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("kernel construction failed: {0}")]
    Kernel(String),
}

impl CapacityError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        CapacityError::Domain(msg.into())
    }

    /// Coarse category used for process exit codes.
    pub fn category(&self) -> ErrorCategory {
        match self {
            CapacityError::Schema(_) => ErrorCategory::Parse,
            CapacityError::Domain(_)
            | CapacityError::Unbounded(_)
            | CapacityError::InvalidChannel(_)
            | CapacityError::Kernel(_) => ErrorCategory::Domain,
            CapacityError::Bracket(_)
            | CapacityError::NonConvergence { .. }
            | CapacityError::Quadrature { .. } => ErrorCategory::Convergence,
            CapacityError::Invariant(_) => ErrorCategory::Invariant,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Parse,
    Domain,
    Convergence,
    Invariant,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Parse => 2,
            ErrorCategory::Domain => 3,
            ErrorCategory::Convergence => 4,
            ErrorCategory::Invariant => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, CapacityError>;
