use std::fmt;
use std::path::Path;

use coarea_core::Error;

/// Exit code 0: success or verdict pass.
pub const EXIT_PASS: u8 = 0;
/// Exit code 1: verdict fail or a failed computation.
pub const EXIT_FAIL: u8 = 1;
/// Exit code 2: invalid configuration or rejected parameters.
pub const EXIT_CONFIG: u8 = 2;
/// Exit code 3: I/O, parse or hash-mismatch error.
pub const EXIT_IO: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { code: EXIT_CONFIG, message: message.into() }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        CliError { code: EXIT_IO, message: message.into() }
    }

    pub fn io(path: &Path, e: impl fmt::Display) -> Self {
        CliError { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Rejected(_) | Error::InvalidArgument(_) | Error::UnknownMetric(_) => EXIT_CONFIG,
            _ => EXIT_FAIL,
        };
        CliError { code, message: e.to_string() }
    }
}
