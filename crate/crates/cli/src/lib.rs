//! Library side of the `coinwalk` command: configuration, runs, reports and
//! traces. The binary is a thin clap wrapper around [`run::run`].

pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod trace;
pub mod verify;

pub use config::{ConfigFile, Format, InputSpec, Mode, PlacementOverride, Protocol, RunConfig};
pub use error::{exit, CliError};
pub use report::{ProtocolReport, Verdict};
pub use run::{run, Outcome};
pub use trace::{emit_csv, parse_csv, CSV_HEADER};
