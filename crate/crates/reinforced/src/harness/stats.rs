//! Summary statistics and the paired sign-flip permutation test.

use super::HarnessError;
use crate::rng::{stream, tag};
use rand::Rng;

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n-1 denominator); 0 for fewer than 2 values.
pub fn sample_sd(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Median; the mean of the middle two for even lengths.
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Two-sided p-value for the mean paired difference under sign-flip
/// permutation. All 2^n sign patterns are enumerated exactly whenever that
/// costs no more than the requested iteration count; otherwise `iterations`
/// random patterns are drawn and the add-one-smoothed estimate returned.
/// Deterministic given the seed.
pub fn paired_permutation_test(
    errors_a: &[f64],
    errors_b: &[f64],
    iterations: usize,
    seed: u64,
) -> Result<f64, HarnessError> {
    if errors_a.len() != errors_b.len() {
        return Err(HarnessError::Stats(format!(
            "paired test needs equal lengths, got {} and {}",
            errors_a.len(),
            errors_b.len()
        )));
    }
    if errors_a.len() < 2 {
        return Err(HarnessError::Stats(
            "paired test needs at least 2 pairs".to_string(),
        ));
    }
    if iterations < 1000 {
        return Err(HarnessError::Stats(format!(
            "paired test needs at least 1000 iterations, got {iterations}"
        )));
    }
    let diffs: Vec<f64> = errors_a
        .iter()
        .zip(errors_b)
        .map(|(a, b)| a - b)
        .collect();
    let n = diffs.len();
    let observed = mean(&diffs).abs();

    let flipped_stat = |pattern: u64| -> f64 {
        let sum: f64 = diffs
            .iter()
            .enumerate()
            .map(|(i, d)| if pattern >> i & 1 == 1 { -d } else { *d })
            .sum();
        (sum / n as f64).abs()
    };

    if n < 63 && (1u64 << n) <= iterations as u64 {
        let total = 1u64 << n;
        let hits = (0..total).filter(|&p| flipped_stat(p) >= observed).count();
        Ok(hits as f64 / total as f64)
    } else {
        let mut rng = stream(seed, &[tag::PERMUTATION]);
        let mut hits = 0usize;
        for _ in 0..iterations {
            let pattern: u64 = rng.random();
            if flipped_stat(pattern) >= observed {
                hits += 1;
            }
        }
        Ok((hits + 1) as f64 / (iterations + 1) as f64)
    }
}
