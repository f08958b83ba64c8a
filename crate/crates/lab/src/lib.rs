//! Experiment runner for the mixing field of the vertex reinforced jump
//! process: parallel chains, file formats, configuration, verification
//! suites and the decay scan behind the `vrjp-lab` binary.

pub mod cli;
pub mod commands;
pub mod config;
pub mod decay;
pub mod graphs;
pub mod parallel;
pub mod records;
pub mod report;
pub mod suites;

pub use vrjp_core as core;
