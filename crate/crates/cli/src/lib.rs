//! Harness around `swede-core`: mesh/config file formats, analytic test
//! fields, initial-condition presets, diagnostic output, verification
//! suites, and the operator convergence study behind the `swede` binary.

pub mod checks;
pub mod config;
pub mod converge;
pub mod fields;
pub mod ic;
pub mod meshfile;
pub mod output;
pub mod runner;
