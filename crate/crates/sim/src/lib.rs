//! File formats and command-line front end for `hrom-core` simulations.
//!
//! - [`config`]: `key = value` scenario files
//! - [`logcsv`]: the CSV log and its reader
//! - [`blocks`]: the plain-text trajectory-matrix format
//! - [`summary`]: the `summary.txt` file
//! - [`app`]: the `run`, `metrics` and `gait` commands

pub mod app;
pub mod blocks;
pub mod config;
pub mod logcsv;
pub mod summary;
