//! Command-line front end for `tgc-core`: reads set files, runs
//! capacity/volume computations and verification sweeps, and writes CSV or
//! JSON tables.

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod spec;

pub use app::main_with;
pub use commands::{run, Command, Outcome};
pub use config::{Format, GridArg, RunConfig};
pub use error::CliError;
pub use spec::{parse_spec, SetKind, SetSpec, SpecFile};
