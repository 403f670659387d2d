//! Experiment runner: configuration, suites and report output.

pub mod config;
pub mod report;
pub mod suites;
