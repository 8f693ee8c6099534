//! Supervised baselines: plain cross-entropy minibatch SGD, with dropout
//! active whenever the spec contains dropout layers, and an optional L2
//! weight penalty for the dropout+l2 method.

use super::{evaluate_epoch, minibatch_partition, Method, TrainConfig, TrainError, TrainRun};
use crate::data::{LabeledDataset, Split};
use crate::nn::{
    grad_weighted_log_prob, l2_penalty_grads, sgd_step, Direction, Mode, NetworkSpec, Tensor,
};
use crate::policy::{Policy, PolicyNet};
use crate::rng::{derive_seed, stream, tag};

/// One epoch of shuffled minibatch cross-entropy descent. Ascending the mean
/// log-probability of the true labels is the same step as descending the
/// cross-entropy loss.
pub(crate) fn supervised_epoch(
    policy: &mut Policy,
    train: &LabeledDataset,
    config: &TrainConfig,
    epoch: usize,
) -> Result<(), TrainError> {
    let mut rng = stream(config.seed, &[tag::UPDATE, epoch as u64]);
    let minibatches = minibatch_partition(train.len(), config.minibatch_size, &mut rng);
    let apply_l2 = config.method == Method::DropoutL2 && config.l2_scale > 0.0;
    for batch_indices in minibatches {
        let batch: Vec<(&Tensor, usize, f64)> = batch_indices
            .iter()
            .map(|&i| {
                let (input, label) = train.sample(i);
                (input, label, 1.0)
            })
            .collect();
        let mut grads = grad_weighted_log_prob(
            policy.params(),
            policy.spec(),
            &batch,
            Mode::Train,
            Some(&mut rng),
        )?;
        if apply_l2 {
            let penalty = l2_penalty_grads(policy.params(), config.l2_scale);
            grads.add_scaled(&penalty, -1.0)?;
        }
        sgd_step(
            policy.params_mut(),
            &grads,
            config.supervised_rate,
            Direction::Ascent,
        )?;
    }
    Ok(())
}

/// Standard supervised training (methods: supervised, dropout, dropout+l2),
/// with the same per-epoch metrics and checkpoints as the reinforced loop.
pub fn train_supervised(
    split: &Split,
    spec: &NetworkSpec,
    config: &TrainConfig,
) -> Result<TrainRun, TrainError> {
    config.validate()?;
    if config.method == Method::Reinforced {
        return Err(TrainError::InvalidConfig(
            "train_supervised called with the reinforced method".to_string(),
        ));
    }
    let mut policy = Policy::new(
        spec.clone(),
        derive_seed(config.seed, &[tag::POLICY_INIT]),
    );
    let mut metrics = Vec::with_capacity(config.max_epochs);
    let mut checkpoints = Vec::with_capacity(config.max_epochs);
    for epoch in 0..config.max_epochs {
        supervised_epoch(&mut policy, &split.train, config, epoch)?;
        metrics.push(evaluate_epoch(&policy, split, epoch, config.evaluate_test)?);
        checkpoints.push(policy.params().snapshot());
    }
    Ok(TrainRun {
        metrics,
        checkpoints,
        policy,
        value: None,
    })
}
