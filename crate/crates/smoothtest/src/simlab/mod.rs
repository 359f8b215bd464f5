//! Monte Carlo simulation lab: data generators for the study designs, the
//! size/power experiment runner, and the experiment-file grammar.

mod config;
mod experiment;
mod generators;

pub use config::{parse_generator, rows_to_csv, CsvRow, SimConfig, SimMode};
pub use experiment::{
    power_curve, run_experiment, run_replicates, size_experiment, ExperimentConfig,
    ExperimentResult, PowerPoint, TestMethod,
};
pub use generators::{density, sample, CovSpec, GeneratorSpec, SampleData};
