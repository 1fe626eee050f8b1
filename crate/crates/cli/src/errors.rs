use std::fmt;

/// Process-level outcomes mapped to exit codes: 2 bad input, 3 solver
/// non-convergence (partial results are still written), 4 resource guard.
#[derive(Debug)]
pub enum CliError {
    BadInput(String),
    NonConvergence(String),
    ResourceGuard(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::BadInput(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::ResourceGuard(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::BadInput(m) => write!(f, "bad input: {m}"),
            CliError::NonConvergence(m) => write!(f, "non-convergence: {m}"),
            CliError::ResourceGuard(m) => write!(f, "resource guard: {m}"),
        }
    }
}

impl From<loocv_core::Error> for CliError {
    fn from(e: loocv_core::Error) -> Self {
        CliError::BadInput(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::BadInput(format!("io: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
