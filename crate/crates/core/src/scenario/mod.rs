//! Scenario files, figure presets, trace records and the verification driver
//! behind the `qudit-phase` binary.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! name = "fig1a"
//! dims = [3, 3]
//!
//! [initial_state]
//! kind = "schmidt"
//! q = 0.0
//! theta = 0.0
//!
//! [grid]
//! t_max = "2pi"
//! steps = 4000
//!
//! [[evolution.a]]
//! kind = "cartan_linear"
//! rates = [1, 1, -2]
//! duration = "2pi"
//! ```
//!
//! See [`config`] for the full schema.

pub mod commands;
pub mod config;
pub mod presets;
pub mod record;
pub mod verify;

use std::fmt;

pub use config::{Scenario, ScenarioConfig, Split, System};
pub use presets::{preset, preset_names};
pub use record::TraceRecord;

/// Process exit codes used by the command-line front end.
pub mod exit {
    pub const OK: i32 = 0;
    pub const TOLERANCE_EXCEEDED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const NO_ORACLE: i32 = 4;
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    /// Unreadable or invalid scenario, or unwritable output.
    Config(String),
    /// A numerical guard fired while running.
    Numerical(String),
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) => exit::CONFIG,
            ScenarioError::Numerical(_) => exit::NUMERICAL,
        }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Config(m) => write!(f, "config error: {m}"),
            ScenarioError::Numerical(m) => write!(f, "numerical guard: {m}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl From<crate::Error> for ScenarioError {
    fn from(e: crate::Error) -> Self {
        use crate::Error::*;
        match e {
            GridTooCoarse { .. } | OpenCosetFactor { .. } | TimeOutOfRange(_) => {
                ScenarioError::Numerical(e.to_string())
            }
            other => ScenarioError::Config(other.to_string()),
        }
    }
}

pub type ScenarioResult<T> = std::result::Result<T, ScenarioError>;
