use serde::Serialize;

/// Failure of a CLI command, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// The config could not be read, parsed or validated.
    #[error("invalid config: {0}")]
    Validation(String),
    /// An estimator failed on at least one grid point.
    #[error("estimator failure: {0}")]
    Estimator(String),
    /// Writing an artifact failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// A verification suite found a failing check.
    #[error("verification failed: {0}")]
    Verification(String),
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    exit_code: i32,
    message: String,
}

impl RunError {
    /// 1 for invalid input, 2 for estimator or output failures, 3 for failed checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) => 1,
            RunError::Estimator(_) | RunError::Io(_) => 2,
            RunError::Verification(_) => 3,
        }
    }

    /// Short machine-readable kind.
    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Validation(_) => "validation",
            RunError::Estimator(_) => "estimator",
            RunError::Io(_) => "io",
            RunError::Verification(_) => "verification",
        }
    }

    /// One-line JSON object describing the error.
    pub fn to_json(&self) -> String {
        let report = ErrorReport {
            error: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
        };
        serde_json::to_string(&report).expect("plain struct serializes")
    }
}

impl From<mdrate_core::Error> for RunError {
    fn from(e: mdrate_core::Error) -> Self {
        RunError::Estimator(e.to_string())
    }
}
