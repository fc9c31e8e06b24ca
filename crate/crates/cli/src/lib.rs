//! Command-line front end for the concentration simulator: scenario files,
//! result records, parameter sweeps and the verification suite.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod args;
pub mod fuzzing;
pub mod record;
pub mod scenario;
pub mod sweep;
pub mod verify;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const PHYSICAL: i32 = 3;
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed scenario: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Invalid(weakconc::Error),
    #[error("physical regime error: {0}")]
    Physical(weakconc::Error),
    #[error("malformed sweep: {0}")]
    Sweep(String),
    #[error("malformed record: {0}")]
    Record(String),
}

impl From<weakconc::Error> for ScenarioError {
    fn from(e: weakconc::Error) -> Self {
        if e.is_physical() {
            ScenarioError::Physical(e)
        } else {
            ScenarioError::Invalid(e)
        }
    }
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Physical(_) => exit::PHYSICAL,
            _ => exit::VALIDATION,
        }
    }
}
