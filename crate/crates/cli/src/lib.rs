//! Library side of the `ccsim` command-line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
