//! Experiment runner for the mabuchi toolkit: scenario files, CSV output,
//! subcommands and the acceptance checks.

pub mod checks;
pub mod commands;
pub mod output;
pub mod scenario;
