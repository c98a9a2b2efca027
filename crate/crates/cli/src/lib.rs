//! Library surface of the batch front-end (exposed for integration tests
//! and fuzz targets; the `chaos` binary is a thin wrapper).

pub mod commands;
pub mod config;
pub mod report;
