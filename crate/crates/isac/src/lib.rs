//! Experiment harness for the three-stage IRS-assisted ISAC channel
//! estimator: configuration, binary file formats and figure sweeps.

pub mod config;
pub mod format;
pub mod harness;
