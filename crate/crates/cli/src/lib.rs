//! Instance I/O, experiment orchestration and report emission for the
//! `latmax` command-line tool.

pub mod experiment;
pub mod fmt;
pub mod presets;
pub mod solve;

pub use experiment::{run_experiment, ExperimentConfig, Guarantee, Report, Row, Verdict};
pub use solve::{solve, Algorithm, SolveOptions};
