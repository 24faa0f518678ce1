use std::fmt;

use charge_lab::Error;

/// Error classes, each with its own exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Parse,
    UniverseMismatch,
    Invariant,
    Missing,
    Computation,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage => 2,
            ErrorKind::Parse => 3,
            ErrorKind::UniverseMismatch => 4,
            ErrorKind::Invariant => 5,
            ErrorKind::Missing => 6,
            ErrorKind::Computation => 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> CliError {
        CliError { kind, message: message.into(), line: None, column: None }
    }

    /// Attaches a position unless one is already known.
    pub fn at(mut self, line: usize, column: usize) -> CliError {
        if self.line.is_none() {
            self.line = Some(line);
            self.column = Some(column);
        }
        self
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let kind = match e {
            Error::Parse(_) => ErrorKind::Parse,
            Error::UniverseMismatch { .. } => ErrorKind::UniverseMismatch,
            Error::Invariant(_) | Error::TooManyGenerators { .. } => ErrorKind::Invariant,
            _ => ErrorKind::Computation,
        };
        CliError::new(kind, e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "error at line {l}, column {c}: {}", self.message),
            _ => write!(f, "error: {}", self.message),
        }
    }
}

impl std::error::Error for CliError {}
