//! Image-recovery experiments and CLI support built on the proxsplit
//! toolkit: deterministic degradation synthesis, experiment construction in
//! smooth and fully proximal forms, PGM image I/O, and problem-description
//! files.

pub mod config;
pub mod experiments;
pub mod image;
pub mod problem_file;
pub mod prox_check;
pub mod rng;

pub use experiments::{
    build_experiment, degrade_deconv, measured_bsnr, run_experiment, AlgoPreset, Experiment,
    ExperimentKind, ExperimentSpec, RunSummary,
};
pub use image::Image;
