use std::fmt;
use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// I/O failure with the path that caused it.
    Io(PathBuf, std::io::Error),
    /// Malformed input at a given 1-based line number.
    Parse {
        path: Option<PathBuf>,
        line: usize,
        message: String,
    },
    /// Invalid argument, empty input, or a violated precondition.
    Invalid(String),
}

impl Error {
    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    pub fn parse(path: Option<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path,
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Io(path, e) => write!(f, "{}: {}", path.display(), e),
            Error::Parse {
                path,
                line,
                message,
            } => match path {
                Some(p) => write!(f, "{}:{}: {}", p.display(), line, message),
                None => write!(f, "line {}: {}", line, message),
            },
            Error::Invalid(message) => write!(f, "{}", message),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(_, e) => Some(e),
            _ => None,
        }
    }
}
