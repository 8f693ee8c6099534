//! Synthetic dataset generators. Pure functions of
//! (family, counts, shape, noise, seed).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{DataError, LabeledDataset};
use crate::nn::Tensor;
use crate::rng::{stream, tag, Prng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Gaussian point clouds around well-separated class anchors.
    Blobs,
    /// Concentric rings in the first two feature dimensions.
    Rings,
    /// Small images of oriented sinusoidal gratings, one orientation and
    /// frequency per class, with a random phase per sample.
    TexturedPatches,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::Blobs => "blobs",
            Family::Rings => "rings",
            Family::TexturedPatches => "textured-patches",
        };
        write!(f, "{name}")
    }
}

impl FromStr for Family {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, DataError> {
        match s {
            "blobs" => Ok(Family::Blobs),
            "rings" => Ok(Family::Rings),
            "textured-patches" => Ok(Family::TexturedPatches),
            other => Err(DataError::UnsupportedFamily(other.to_string())),
        }
    }
}

/// Generate a labeled dataset. Classes are separable at noise 0 and overlap
/// increasingly as noise grows; identical arguments yield identical datasets.
pub fn generate_synthetic(
    family: Family,
    class_counts: &[usize],
    input_shape: &[usize],
    noise: f64,
    seed: u64,
) -> Result<LabeledDataset, DataError> {
    if class_counts.is_empty() || class_counts.contains(&0) {
        return Err(DataError::InvalidDataset(
            "class counts must be non-empty and positive".to_string(),
        ));
    }
    if noise.is_nan() || noise < 0.0 {
        return Err(DataError::InvalidDataset(format!(
            "noise must be non-negative, got {noise}"
        )));
    }
    let mut rng = stream(seed, &[tag::DATASET, family_tag(family)]);
    let samples = match family {
        Family::Blobs => blobs(class_counts, input_shape, noise, &mut rng)?,
        Family::Rings => rings(class_counts, input_shape, noise, &mut rng)?,
        Family::TexturedPatches => patches(class_counts, input_shape, noise, &mut rng)?,
    };
    LabeledDataset::new(family.to_string(), class_counts.len(), samples)
}

fn family_tag(family: Family) -> u64 {
    match family {
        Family::Blobs => 1,
        Family::Rings => 2,
        Family::TexturedPatches => 3,
    }
}

fn gaussian(rng: &mut Prng) -> f64 {
    StandardNormal.sample(rng)
}

fn flat_dim(shape: &[usize]) -> usize {
    shape.iter().product()
}

/// Class anchors at least 2 apart in some coordinate: a fixed offset on the
/// axis `k % dim` plus a small seeded jitter.
fn blob_anchors(num_classes: usize, dim: usize, rng: &mut Prng) -> Vec<Vec<f64>> {
    (0..num_classes)
        .map(|k| {
            let mut anchor: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
            anchor[k % dim] += 3.0 * (1.0 + (k / dim) as f64);
            anchor
        })
        .collect()
}

fn blobs(
    class_counts: &[usize],
    input_shape: &[usize],
    noise: f64,
    rng: &mut Prng,
) -> Result<Vec<(Tensor, usize)>, DataError> {
    let dim = flat_dim(input_shape);
    if dim < 1 {
        return Err(DataError::ShapeTooSmall {
            family: Family::Blobs.to_string(),
            shape: input_shape.to_vec(),
        });
    }
    let anchors = blob_anchors(class_counts.len(), dim, rng);
    let mut samples = Vec::new();
    for (label, &count) in class_counts.iter().enumerate() {
        for _ in 0..count {
            let values: Vec<f64> = anchors[label]
                .iter()
                .map(|&m| m + noise * gaussian(rng))
                .collect();
            samples.push((Tensor::from_values(input_shape, values).unwrap(), label));
        }
    }
    Ok(samples)
}

fn rings(
    class_counts: &[usize],
    input_shape: &[usize],
    noise: f64,
    rng: &mut Prng,
) -> Result<Vec<(Tensor, usize)>, DataError> {
    let dim = flat_dim(input_shape);
    if dim < 2 {
        return Err(DataError::ShapeTooSmall {
            family: Family::Rings.to_string(),
            shape: input_shape.to_vec(),
        });
    }
    let mut samples = Vec::new();
    for (label, &count) in class_counts.iter().enumerate() {
        let radius = 1.5 * (label as f64 + 1.0);
        for _ in 0..count {
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            let mut values = vec![0.0; dim];
            values[0] = radius * theta.cos();
            values[1] = radius * theta.sin();
            for v in values.iter_mut() {
                *v += noise * gaussian(rng);
            }
            samples.push((Tensor::from_values(input_shape, values).unwrap(), label));
        }
    }
    Ok(samples)
}

fn patches(
    class_counts: &[usize],
    input_shape: &[usize],
    noise: f64,
    rng: &mut Prng,
) -> Result<Vec<(Tensor, usize)>, DataError> {
    let too_small = || DataError::ShapeTooSmall {
        family: Family::TexturedPatches.to_string(),
        shape: input_shape.to_vec(),
    };
    let [h, w, ch] = match input_shape {
        [h, w, c] => [*h, *w, *c],
        _ => return Err(too_small()),
    };
    if h < 4 || w < 4 || ch < 1 {
        return Err(too_small());
    }
    let num_classes = class_counts.len();
    let mut samples = Vec::new();
    // One grating orientation per class at a shared spatial frequency, with a
    // random phase per sample. Orientation survives phase shifts, so small
    // conv filters can separate the classes without memorizing phases.
    let freq = std::f64::consts::TAU * 2.0 / h as f64;
    for (label, &count) in class_counts.iter().enumerate() {
        let angle = std::f64::consts::PI * label as f64 / num_classes as f64;
        let (dx, dy) = (angle.cos(), angle.sin());
        for _ in 0..count {
            let phase = rng.random::<f64>() * std::f64::consts::TAU;
            let mut values = Vec::with_capacity(h * w * ch);
            for r in 0..h {
                for c in 0..w {
                    let signal = (freq * (r as f64 * dx + c as f64 * dy) + phase).sin();
                    for _ in 0..ch {
                        values.push(signal + noise * gaussian(rng));
                    }
                }
            }
            samples.push((Tensor::from_values(input_shape, values).unwrap(), label));
        }
    }
    Ok(samples)
}
