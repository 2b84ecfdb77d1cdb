use std::fmt;
use std::io;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_GUARD: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<covsketch::Error> for CliError {
    fn from(err: covsketch::Error) -> Self {
        use covsketch::Error as E;
        let code = match &err {
            E::Param(_) | E::Domain(_) | E::Incompatible(_) | E::State(_) => EXIT_CONFIG,
            E::Guard { .. } => EXIT_GUARD,
            E::Parse { .. } | E::Range { .. } | E::Format(_) | E::IsolatedElement(_) | E::Io(_) => EXIT_IO,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        Self::io(err.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        Self::io(err.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        Self::io(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
