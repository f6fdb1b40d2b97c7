//! Benchmark games, experiment configuration and artifact writing.

pub mod config;
pub mod games;
pub mod matrix;
pub mod run;

pub use config::{
    BlockSelection, CompensatorConfig, ExperimentConfig, GameSelection, GraphConfig,
    GraphSelection, InitialCondition, ProbeKind, SCHEMA,
};
pub use games::{make_cournot, make_sensor_network, make_zero_sum_example, CournotMetadata};
pub use matrix::{matrix, run_batch, MATRIX_NAMES};
pub use run::{execute, run_experiment, RunOutcome, Summary};
