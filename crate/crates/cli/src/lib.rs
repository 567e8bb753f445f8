//! Command-line front end for `nmchan_core`: run configuration, CSV output
//! and the `coeffs`, `trace`, `septime`, `sweep` and `fig1` commands.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;

pub use commands::{coeffs, emit, fig1, fig1_panel, septime, separability_times, sweep, trace, Axis, TraceOutput};
pub use config::{Mode, Overrides, RunConfig};
pub use error::{CliError, Result};
