//! Std companion to `qtomo-core`: file formats, parallel Wigner grids, the end-to-end
//! pipeline and the `qtomo` command-line tool.

pub mod cli;
pub mod error;
pub mod formats;
pub mod grid;
pub mod manifest;
pub mod output;
pub mod pipeline;
pub mod statespec;

pub use error::{CliError, ExitCode};
