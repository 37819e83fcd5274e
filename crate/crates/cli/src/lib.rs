//! Command-line front end: document formats, name resolution, dispatch and
//! report rendering.
//!
//! Exit codes: 0 when every checked property holds, 1 when one fails, 2 on
//! invalid input.

pub mod document;
pub mod error;

mod commands;

pub use commands::{canonical, run_command, Outcome};
pub use document::{parse_documents, parse_input, render, Document, Payload, Workspace};
pub use error::CliError;
