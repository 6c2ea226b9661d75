use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid condition: {0}")]
    InvalidCondition(String),

    #[error("mass matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("mass matrix is singular")]
    SingularMassMatrix,

    #[error("thrust calibration infeasible: {0}")]
    InfeasibleCalibration(String),

    #[error("invalid scenario: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),

    #[error("non-finite state at t = {time} s: {detail}")]
    NonFinite { time: f64, detail: String },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("analysis: {0}")]
    Analysis(String),

    #[error("incompatible logs: {0}")]
    Incompatible(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad input rather than by a failing computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidGeometry(_)
                | Error::InvalidCondition(_)
                | Error::InvalidScenario(_)
                | Error::Parse { .. }
                | Error::Config(_)
                | Error::Incompatible(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
