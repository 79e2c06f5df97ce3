//! File formats, reports and the command-line front end for `ttensor`.

pub mod bench;
mod cli;
pub mod error;
pub mod io;
pub mod report;
pub mod verify;

pub use cli::run;
pub use error::{exit, tensor_exit_code, CliError};
