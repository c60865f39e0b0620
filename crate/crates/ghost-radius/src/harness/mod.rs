//! Experiment harness: configuration, datasets, drivers, and record I/O.

pub mod config;
pub mod dataset;
pub mod emit;
pub mod experiments;

pub use config::{ExperimentConfig, RawConfig};
pub use dataset::{load_dataset, Dataset};
pub use emit::{emit, Format, RunRecord, StepRow, SweepRow};
pub use experiments::{
    architecture, run_phase_sweep, run_random_dirs, run_spike, run_target_r_train,
    run_temperature, ARCHITECTURES,
};
