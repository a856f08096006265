//! Experiment runner and verification suites on top of `mdrate-core`.
//!
//! A run reads one TOML config, estimates the deviation probabilities over
//! its `n` grid and writes `trajectory.csv`, `exponents.json` and
//! `manifest.json`. Results depend only on the config, never on the
//! number of worker threads.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod exec;
pub mod output;
pub mod presets;
pub mod run;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::RunError;
pub use exec::RayonExecutor;
