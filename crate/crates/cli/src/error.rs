use std::fmt;

use ptlab::PtError;

pub const EXIT_PARSE: u8 = 2;
pub const EXIT_KIND: u8 = 3;
pub const EXIT_CONSTRAINT: u8 = 4;
pub const EXIT_MISMATCH: u8 = 5;
pub const EXIT_OTHER: u8 = 1;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(EXIT_PARSE, message)
    }

    pub fn kind(message: impl Into<String>) -> Self {
        Self::new(EXIT_KIND, message)
    }

    pub fn constraint(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONSTRAINT, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<PtError> for CliError {
    fn from(e: PtError) -> Self {
        let code = match e {
            PtError::Parse(_) => EXIT_PARSE,
            PtError::Dimension(_) | PtError::Contract(_) => EXIT_KIND,
            PtError::Constraint(_) | PtError::Singular(_) => EXIT_CONSTRAINT,
            PtError::Numerical(_) => EXIT_OTHER,
        };
        Self::new(code, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(EXIT_OTHER, format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::new(EXIT_OTHER, format!("csv error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
