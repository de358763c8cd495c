//! Experiment runner on top of [`grds`]: flat TOML configs, the four
//! case-study presets, and CSV/JSON reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiment;

pub use config::{preset, ConfigError, ExperimentConfig, SchemeChoice, TopologySource, PRESETS};
pub use experiment::{
    load_graph, run_experiment, spectral_report, CliError, ExperimentReport, SchemeRow,
    SpectralReport,
};
