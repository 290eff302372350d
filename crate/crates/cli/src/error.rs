//! CLI error type and the exit-code policy.
//!
//! Every failure is classified into one of three exit codes: 1 for usage
//! errors (bad flags, bad config keys, impossible requests), 2 for numerical
//! failures inside a computation, 3 for I/O failures (missing or malformed
//! files). Success is 0; a design run that finishes without reaching its
//! tolerance also exits 2.

use odoem::baselines::BaselineError;
use odoem::datasets::DatasetError;
use odoem::design::DesignError;
use odoem::harness::HarnessError;
use odoem::kernels::KernelError;
use odoem::numerics::NumericsError;
use odoem::pool::PoolError;
use thiserror::Error;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

impl From<DatasetError> for CliError {
    fn from(err: DatasetError) -> Self {
        match err {
            DatasetError::NotPerfectSquare { .. }
            | DatasetError::NegativeNoise(_)
            | DatasetError::UnknownKind { .. } => CliError::Usage(err.to_string()),
            _ => CliError::Io(err.to_string()),
        }
    }
}

impl From<DesignError> for CliError {
    fn from(err: DesignError) -> Self {
        match err {
            DesignError::BudgetExceedsPool { .. } => CliError::Usage(err.to_string()),
            _ => CliError::Numerical(err.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(err: HarnessError) -> Self {
        match err {
            HarnessError::BudgetExceedsPool { .. } => CliError::Usage(err.to_string()),
            _ => CliError::Numerical(err.to_string()),
        }
    }
}

impl From<BaselineError> for CliError {
    fn from(err: BaselineError) -> Self {
        match err {
            BaselineError::UnknownStrategy { .. } => CliError::Usage(err.to_string()),
            _ => CliError::Numerical(err.to_string()),
        }
    }
}

impl From<PoolError> for CliError {
    fn from(err: PoolError) -> Self {
        CliError::Numerical(err.to_string())
    }
}

impl From<NumericsError> for CliError {
    fn from(err: NumericsError) -> Self {
        CliError::Numerical(err.to_string())
    }
}

impl From<KernelError> for CliError {
    fn from(err: KernelError) -> Self {
        CliError::Numerical(err.to_string())
    }
}
