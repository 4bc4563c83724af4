//! Command-line front end for the `quasithermal` library.

pub mod commands;
pub mod config;
