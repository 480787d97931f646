//! Command-line front end for the separated solver: configuration,
//! solves, convergence studies and TD-vs-FDM benchmarks.

pub mod commands;
pub mod config;
