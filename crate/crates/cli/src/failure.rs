use std::fmt::Display;

use prnk_core::Error;

/// An error paired with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

pub const EXIT_NOT_CONVERGED: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;

impl Failure {
    pub fn usage(msg: impl Display) -> Self {
        Self {
            code: EXIT_USAGE,
            error: anyhow::anyhow!("{msg}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => EXIT_IO,
            Error::InvalidParameter(_) | Error::UnsupportedFormat(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Self {
            code,
            error: e.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            error: e.into(),
        }
    }
}

pub trait Context<T> {
    fn context(self, what: impl Display) -> Result<T, Failure>;
}

impl<T, E: Into<Failure>> Context<T> for Result<T, E> {
    fn context(self, what: impl Display) -> Result<T, Failure> {
        self.map_err(|e| {
            let mut f: Failure = e.into();
            f.error = f.error.context(what.to_string());
            f
        })
    }
}
