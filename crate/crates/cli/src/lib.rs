//! Command-line driver: configuration files, binary snapshots and the
//! experiment runners behind the `monopole-lab` binary.

pub mod config;
pub mod error;
pub mod experiments;
pub mod snapshot;

pub use config::{Experiment, RunConfig};
pub use error::CliError;
pub use experiments::{run, Outcome};
pub use snapshot::{Snapshot, SnapshotError};
