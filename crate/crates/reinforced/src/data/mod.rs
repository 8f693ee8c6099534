//! Small, overfit-prone labeled datasets: synthetic generators, a CSV
//! loader/saver, and deterministic stratified 3:1:1 splitting.

mod csv;
mod split;
mod synth;

pub use csv::{load_csv, save_csv};
pub use split::split_311;
pub use synth::{generate_synthetic, Family};

use std::path::PathBuf;

use thiserror::Error;

use crate::nn::Tensor;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("unsupported dataset family {0:?}")]
    UnsupportedFamily(String),
    #[error("input shape {shape:?} too small for family {family}")]
    ShapeTooSmall { family: String, shape: Vec<usize> },
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("empty dataset file")]
    EmptyFile,
    #[error("class {class} has only {count} samples; at least {required} required")]
    ClassTooSmall {
        class: usize,
        count: usize,
        required: usize,
    },
}

/// A labeled dataset: same-shape inputs, 0-based integer labels, every class
/// inhabited. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    name: String,
    num_classes: usize,
    samples: Vec<(Tensor, usize)>,
}

impl LabeledDataset {
    pub fn new(
        name: impl Into<String>,
        num_classes: usize,
        samples: Vec<(Tensor, usize)>,
    ) -> Result<Self, DataError> {
        if samples.is_empty() {
            return Err(DataError::InvalidDataset("no samples".to_string()));
        }
        if num_classes < 1 {
            return Err(DataError::InvalidDataset("no classes".to_string()));
        }
        let shape = samples[0].0.shape().to_vec();
        let mut seen = vec![false; num_classes];
        for (i, (input, label)) in samples.iter().enumerate() {
            if input.shape() != shape {
                return Err(DataError::InvalidDataset(format!(
                    "sample {i} has shape {:?}, expected {shape:?}",
                    input.shape()
                )));
            }
            if *label >= num_classes {
                return Err(DataError::InvalidDataset(format!(
                    "sample {i} has label {label}, expected < {num_classes}"
                )));
            }
            seen[*label] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(DataError::InvalidDataset(format!(
                "class {missing} has no samples"
            )));
        }
        Ok(LabeledDataset {
            name: name.into(),
            num_classes,
            samples,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn input_shape(&self) -> &[usize] {
        self.samples[0].0.shape()
    }

    pub fn sample(&self, idx: usize) -> (&Tensor, usize) {
        let (input, label) = &self.samples[idx];
        (input, *label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Tensor, usize)> {
        self.samples.iter().map(|(t, l)| (t, *l))
    }

    /// Per-class sample counts.
    pub fn class_histogram(&self) -> Vec<usize> {
        let mut hist = vec![0; self.num_classes];
        for (_, label) in &self.samples {
            hist[*label] += 1;
        }
        hist
    }
}

/// A 3:1:1 partition of a source dataset into train, validation, and test.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: LabeledDataset,
    pub validation: LabeledDataset,
    pub test: LabeledDataset,
    pub seed: u64,
}
