//! IO companion to [`vitals_core`]: the JSONL telemetry log format, the
//! key-value scenario format, CSV/report writers, and the command
//! implementations behind the `vitals` binary.

pub mod commands;
pub mod config;
pub mod csvout;
pub mod error;
pub mod jsonl;
pub mod scenario;

pub use config::EngineConfig;
pub use error::{CliError, FormatError};
