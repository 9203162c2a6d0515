use thiserror::Error;

/// Errors produced anywhere in the lab.
///
/// The three broad classes map onto distinct CLI exit codes: malformed input,
/// numerical failure, and an inconclusive search.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("input error: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("numerical error: {message} (residual {residual:e})")]
    Numerical { message: String, residual: f64 },

    #[error("empty point cloud: {0}")]
    EmptyCloud(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

impl LabError {
    pub fn input(msg: impl Into<String>) -> Self {
        LabError::Input(msg.into())
    }

    pub fn numerical(msg: impl Into<String>, residual: f64) -> Self {
        LabError::Numerical {
            message: msg.into(),
            residual,
        }
    }

    /// Broad class of the error, used for process exit codes.
    pub fn class(&self) -> ErrorClass {
        match self {
            LabError::Input(_) | LabError::Dimension { .. } | LabError::Unsupported(_) => {
                ErrorClass::Input
            }
            LabError::Numerical { .. } | LabError::EmptyCloud(_) | LabError::Singular(_) => {
                ErrorClass::Numerical
            }
            LabError::Inconclusive(_) => ErrorClass::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Numerical,
    Inconclusive,
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(LabError::Dimension { expected, got })
    }
}
