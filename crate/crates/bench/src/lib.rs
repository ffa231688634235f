//! Benchmark harness for the adaptive-basis sparse simulator.
//!
//! An [`ExperimentConfig`](config::ExperimentConfig) names a circuit family, a grid of
//! qubit counts and budgets, and a list of paired simulator arms. Every arm runs on the
//! same circuit instance per trial; rows are written as JSONL and CSV, and a summary with
//! geometric means, bootstrap and Wilson intervals and Wilcoxon tests is derived from
//! the rows alone.

pub mod analysis;
pub mod config;
pub mod output;
pub mod rows;
pub mod runner;
pub mod seeds;
pub mod summary;
pub mod verify;

pub use config::{Arm, ExperimentConfig};
pub use rows::{parse_jsonl, ResultRow, SCHEMA_VERSION};
pub use runner::run_experiment;
pub use summary::{summarize, Summary};
