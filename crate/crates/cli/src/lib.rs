//! Command-line sweep driver over the two-reservoir transmitter model.
//!
//! The binary reads a `key = value` config, runs one figure-style scenario
//! (ratio curves, BER sweeps, balancing costs, strategy gaps, or a single
//! operating point), and emits a CSV to stdout or a file. The library half
//! exposes the same pipeline for tests: [`config::parse_config`] into
//! [`scenario::run_scenario`].

pub mod config;
pub mod scenario;

pub use config::{parse_config, ConfigError, Method, Scenario, SweepConfig};
pub use scenario::{run_scenario, CliError};
