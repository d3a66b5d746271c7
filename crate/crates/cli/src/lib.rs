//! Command-line front end: CSV ingestion, the `estimate`, `ggm`, `pg` and
//! `simulate` commands, and graph/matrix export.

pub mod commands;
pub mod format;

pub use commands::{run, Cli};
pub use format::OutputFormat;
