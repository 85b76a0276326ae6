use std::fmt;

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const INPUT: i32 = 1;
    pub const INTERNAL: i32 = 2;
    pub const VERIFICATION: i32 = 3;
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or invalid input files, infeasible requests.
    Input(String),
    /// Failures that are not the caller's fault, such as an unwritable
    /// output or a broken socket.
    Internal(String),
    /// `verify-paper` found a failing acceptance row.
    Verification(usize),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => exit::INPUT,
            CliError::Internal(_) => exit::INTERNAL,
            CliError::Verification(_) => exit::VERIFICATION,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Internal(m) => f.write_str(m),
            CliError::Verification(n) => write!(f, "{n} acceptance row(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<rdladder::Error> for CliError {
    fn from(e: rdladder::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
