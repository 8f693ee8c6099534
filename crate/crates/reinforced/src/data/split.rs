//! Deterministic stratified 3:1:1 splitting.

use rand::seq::SliceRandom;

use super::{DataError, LabeledDataset, Split};
use crate::rng::{stream, tag};

const MIN_PER_CLASS: usize = 5;

/// Per-class 3:1:1 apportionment by largest remainder. Ties between equal
/// remainders favor train, then validation, then test.
fn apportion(n: usize) -> [usize; 3] {
    let weights = [3.0, 1.0, 1.0];
    let mut counts = [0usize; 3];
    let mut remainders = [0.0f64; 3];
    let mut assigned = 0;
    for i in 0..3 {
        let exact = n as f64 * weights[i] / 5.0;
        counts[i] = exact.floor() as usize;
        remainders[i] = exact - exact.floor();
        assigned += counts[i];
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        remainders[b]
            .partial_cmp(&remainders[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    for &part in order.iter().take(n - assigned) {
        counts[part] += 1;
    }
    counts
}

/// Stratified split into train (3), validation (1), and test (1) parts.
/// Every class needs at least 5 samples; the parts are disjoint, exhaust the
/// source, and are deterministic in the seed.
pub fn split_311(dataset: &LabeledDataset, seed: u64) -> Result<Split, DataError> {
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); dataset.num_classes()];
    for (i, (_, label)) in dataset.iter().enumerate() {
        by_class[label].push(i);
    }
    for (class, indices) in by_class.iter().enumerate() {
        if indices.len() < MIN_PER_CLASS {
            return Err(DataError::ClassTooSmall {
                class,
                count: indices.len(),
                required: MIN_PER_CLASS,
            });
        }
    }

    let mut rng = stream(seed, &[tag::SPLIT]);
    let mut parts: [Vec<(crate::nn::Tensor, usize)>; 3] = Default::default();
    for indices in by_class.iter_mut() {
        indices.shuffle(&mut rng);
        let [n_train, n_val, _] = apportion(indices.len());
        for (pos, &src) in indices.iter().enumerate() {
            let part = if pos < n_train {
                0
            } else if pos < n_train + n_val {
                1
            } else {
                2
            };
            let (input, label) = dataset.sample(src);
            parts[part].push((input.clone(), label));
        }
    }

    let [train_samples, val_samples, test_samples] = parts;
    let name = dataset.name();
    Ok(Split {
        train: LabeledDataset::new(
            format!("{name}-train"),
            dataset.num_classes(),
            train_samples,
        )?,
        validation: LabeledDataset::new(
            format!("{name}-validation"),
            dataset.num_classes(),
            val_samples,
        )?,
        test: LabeledDataset::new(format!("{name}-test"), dataset.num_classes(), test_samples)?,
        seed,
    })
}
