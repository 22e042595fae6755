//! System files, the analysis pipeline behind the `constraint-forge` binary,
//! and its reports.

pub mod report;
pub mod run;
pub mod sysfile;

pub use report::SystemReport;
pub use run::{run, CliError, Command, Outcome, RunOptions};
pub use sysfile::{parse_system_file, Engine, SystemFile};

/// Environment variable overriding the stage limit of every engine.
pub const MAX_STAGES_ENV: &str = "CONSTRAINT_FORGE_MAX_STAGES";
