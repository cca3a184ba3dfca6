//! Crate-wide error type and exit-code mapping for the CLI.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration; `field` names the offending key.
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    /// Two fields/grids that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A wave packet does not fit the periodic domain with margin.
    #[error("packet too wide for domain: needs half-width {required}, domain offers {available}")]
    PacketTooWide { required: f64, available: f64 },

    /// Non-finite amplitudes encountered during time stepping.
    #[error("numerical abort at t = {time}: {message}")]
    NumericalAbort { time: f64, message: String },

    /// Precondition violated by a direct library call.
    #[error("{0}")]
    InvalidInput(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 0 ok, 1 check failure/other, 2 config error,
    /// 3 numerical abort. Check failures are signalled by the verify
    /// report, not by this type.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::PacketTooWide { .. } => 2,
            Error::NumericalAbort { .. } => 3,
            _ => 1,
        }
    }
}
