//! Command-line front end: configuration, domain registry, CSV and SVG
//! output around `shapelab-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
pub mod config;
pub mod error;
pub mod registry;
pub mod svg;

pub use commands::{metadata_line, parse_spectrum_csv, run_cli};
pub use error::CliError;
