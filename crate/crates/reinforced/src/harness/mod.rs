//! Command-line experiment orchestration: dataset generation, single-run
//! training with learning-curve export, optimal-epoch reporting, multi-split
//! comparison studies with significance testing, and reproducible run
//! manifests.

mod commands;
mod config;
mod manifest;
pub mod stats;

pub use commands::{
    cmd_compare, cmd_generate, cmd_report, cmd_train, format_error_row, insert_dropout,
    CompareSummary, TrainSummary,
};
pub use config::Config;
pub use manifest::{load_params, save_params};

use std::path::PathBuf;

use thiserror::Error;

use crate::data::DataError;
use crate::nn::NnError;
use crate::policy::PolicyError;
use crate::trainer::TrainError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("config {path}: unknown key {key:?}")]
    UnknownKey { path: PathBuf, key: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Engine(#[from] NnError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("invalid statistics input: {0}")]
    Stats(String),
}
