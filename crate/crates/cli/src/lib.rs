//! Command-line front end for `gensphere`.
//!
//! A TOML config ([`config::DistConfig`]) declares the contour terms, the
//! radial law, mesh settings and a seed. `gensphere build` runs the
//! expensive finish step once and stores the result as a JSON contour file
//! ([`container::ContourFile`]); the other subcommands load that file.
//!
//! Exit codes: 0 on success, 2 for user or validation errors, 3 for
//! degenerate contours and numeric failures.

pub mod app;
pub mod commands;
pub mod config;
pub mod container;
pub mod csvio;
pub mod error;
pub mod expr;

pub use error::{CliError, CliResult};
