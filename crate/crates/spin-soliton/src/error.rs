//! Crate-wide error type and the CLI exit-code convention.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical or numerical parameter failed validation.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A closed form was requested in a regime where it does not exist
    /// (e.g. a bright soliton with c1 <= 0).
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    /// An amplitude left the configured magnitude ceiling or became
    /// non-finite during integration.
    #[error("numeric blowup at t = {time}: amplitude at {location} exceeds ceiling {ceiling:e}")]
    NumericBlowup {
        time: f64,
        location: String,
        ceiling: f64,
    },

    /// The requested time step violates the explicit stability bound.
    #[error("time step {dt:e} exceeds the stability bound {bound:e}")]
    StepSize { dt: f64, bound: f64 },

    /// Two fields on different grids were combined.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A profile was too flat for extremum tracking.
    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),

    /// Config- or CLI-level validation failure.
    #[error("{0}")]
    Validation(String),

    /// Config text could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A persisted file does not match the documented schema.
    #[error("schema mismatch in {path}: {message}")]
    SchemaMismatch { path: String, message: String },

    /// Another run holds the lock on the requested output directory.
    #[error("output directory {0}")]
    DirectoryLocked(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("metadata error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status for the CLI: 1 for validation-type failures,
    /// 2 for numeric blowup. (Exit 3 — a failed experiment assertion — is
    /// not an `Error`; the run completes and the report carries the result.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NumericBlowup { .. } => 2,
            _ => 1,
        }
    }
}
