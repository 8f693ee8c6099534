//! The reinforced training loop.
//!
//! Each epoch has two phases. Exploration visits every training input once:
//! sample a class epsilon-greedily, sync and tilt a private mirror toward it,
//! measure the train+validation loss improvement as the reward, and record
//! value estimates for the original and tilted policies. Neither the policy
//! nor the value network changes during exploration. The update phase then
//! partitions the experiences into minibatches and applies, per minibatch, a
//! value descent step on the bootstrapped returns followed by a combined
//! policy ascent step: advantage-weighted log-probabilities of the explored
//! classes plus a dampened log-probability term on the true labels.

use rayon::prelude::*;

use super::{
    advantage, dataset_loss, evaluate_epoch, minibatch_partition, reward, Experience, Method,
    SupervisedTermWeighting, TrainConfig, TrainError, TrainRun,
};
use crate::data::{LabeledDataset, Split};
use crate::nn::{grad_weighted_log_prob, sgd_step, Direction, Mode, NetworkSpec, Tensor};
use crate::policy::{
    class_distribution, sample_action, EpsilonSchedule, MirrorPolicy, Policy, PolicyNet,
};
use crate::rng::{derive_seed, stream, tag};
use crate::value::{augmented_state, value, value_update, ValueNetwork};

#[allow(clippy::too_many_arguments)]
fn explore_one(
    policy: &Policy,
    valuenet: &ValueNetwork,
    train: &LabeledDataset,
    validation: &LabeledDataset,
    epsilon: f64,
    cached_losses: (f64, f64),
    config: &TrainConfig,
    epoch: usize,
    state_index: usize,
) -> Result<Experience, TrainError> {
    let mut rng = stream(
        config.seed,
        &[tag::EXPLORE, epoch as u64, state_index as u64],
    );
    let (input, _) = train.sample(state_index);
    let dist = class_distribution(policy, input)?;
    let action = sample_action(&dist, epsilon, &mut rng);

    let mut mirror = MirrorPolicy::of(policy);
    crate::policy::tilt(&mut mirror, input, action, config.tilt_rate)?;

    let r = reward(&mirror, train, validation, cached_losses)?;
    let v_policy = value(valuenet, &augmented_state(policy, input)?)?;
    let v_tilted = value(valuenet, &augmented_state(&mirror, input)?)?;
    Ok(Experience {
        state_index,
        action,
        reward: r,
        v_policy,
        v_tilted,
    })
}

/// Gather one experience per training input, in randomized visit order,
/// without touching the policy or value parameters. Experiences come back
/// merged by state index. Per-experience randomness is keyed by
/// (seed, epoch, state index), so any worker count gives the same result.
pub fn explore_epoch(
    policy: &Policy,
    valuenet: &ValueNetwork,
    train: &LabeledDataset,
    validation: &LabeledDataset,
    epsilon: f64,
    config: &TrainConfig,
    epoch: usize,
) -> Result<Vec<Experience>, TrainError> {
    if train.is_empty() {
        return Err(TrainError::EmptyDataset(train.name().to_string()));
    }
    let cached = (
        dataset_loss(policy, train)?,
        dataset_loss(policy, validation)?,
    );

    let mut order: Vec<usize> = (0..train.len()).collect();
    {
        use rand::seq::SliceRandom;
        let mut visit_rng = stream(config.seed, &[tag::VISIT_ORDER, epoch as u64]);
        order.shuffle(&mut visit_rng);
    }

    let run = |idx: &usize| {
        explore_one(
            policy, valuenet, train, validation, epsilon, cached, config, epoch, *idx,
        )
    };
    let mut experiences: Vec<Experience> = if config.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| TrainError::WorkerPool(e.to_string()))?;
        pool.install(|| order.par_iter().map(run).collect::<Result<Vec<_>, _>>())?
    } else {
        order.iter().map(run).collect::<Result<Vec<_>, _>>()?
    };
    experiences.sort_by_key(|e| e.state_index);
    Ok(experiences)
}

/// Apply one epoch of minibatch updates from a set of experiences. Value
/// updates precede policy updates within each minibatch; true labels are
/// fetched from the training set by state index.
pub fn update_epoch(
    policy: &mut Policy,
    valuenet: &mut ValueNetwork,
    experiences: &[Experience],
    train: &LabeledDataset,
    config: &TrainConfig,
    epoch: usize,
) -> Result<(), TrainError> {
    if experiences.is_empty() {
        return Err(TrainError::EmptyDataset("experience set".to_string()));
    }
    let mut rng = stream(config.seed, &[tag::UPDATE, epoch as u64]);
    let minibatches = minibatch_partition(experiences.len(), config.minibatch_size, &mut rng);

    for batch_indices in minibatches {
        let batch: Vec<&Experience> = batch_indices.iter().map(|&i| &experiences[i]).collect();

        // Value regression toward the bootstrapped returns. The returns are
        // constants built from exploration-time values; the regression input
        // is the augmented state of the current policy.
        let mut value_batch = Vec::with_capacity(batch.len());
        for exp in &batch {
            let (input, _) = train.sample(exp.state_index);
            let state = augmented_state(policy, input)?;
            let target = exp.reward + config.discount * exp.v_tilted;
            value_batch.push((state, target));
        }
        value_update(valuenet, &value_batch, config.value_rate)?;

        // Combined policy ascent: advantage-weighted explored actions plus
        // the dampened true-label term.
        let explored: Vec<(&Tensor, usize, f64)> = batch
            .iter()
            .map(|exp| {
                let (input, _) = train.sample(exp.state_index);
                (input, exp.action, advantage(exp, config.discount))
            })
            .collect();
        let supervised: Vec<(&Tensor, usize, f64)> = batch
            .iter()
            .map(|exp| {
                let (input, label) = train.sample(exp.state_index);
                let weight = match config.supervised_term {
                    SupervisedTermWeighting::Unit => 1.0,
                    SupervisedTermWeighting::Advantage => advantage(exp, config.discount),
                };
                (input, label, weight)
            })
            .collect();

        let g_explored = grad_weighted_log_prob(
            policy.params(),
            policy.spec(),
            &explored,
            Mode::Train,
            Some(&mut rng),
        )?;
        let g_supervised = grad_weighted_log_prob(
            policy.params(),
            policy.spec(),
            &supervised,
            Mode::Train,
            Some(&mut rng),
        )?;
        let mut combined = policy.params().zeros_like();
        combined.add_scaled(&g_explored, config.reinforced_weight)?;
        combined.add_scaled(&g_supervised, config.dampening)?;
        sgd_step(
            policy.params_mut(),
            &combined,
            config.policy_rate,
            Direction::Ascent,
        )?;
    }
    Ok(())
}

/// Run the full reinforced loop for `config.max_epochs` epochs, recording
/// eval-mode metrics and a policy checkpoint after every epoch.
pub fn train_reinforced(
    split: &Split,
    spec: &NetworkSpec,
    config: &TrainConfig,
) -> Result<TrainRun, TrainError> {
    config.validate()?;
    if config.method != Method::Reinforced {
        return Err(TrainError::InvalidConfig(format!(
            "train_reinforced called with method {}",
            config.method
        )));
    }
    let mut policy = Policy::new(
        spec.clone(),
        derive_seed(config.seed, &[tag::POLICY_INIT]),
    );
    let feature_width = spec.penultimate_width(split.train.input_shape())?;
    let mut valuenet = ValueNetwork::new(
        feature_width + spec.num_classes(),
        derive_seed(config.seed, &[tag::VALUE_INIT]),
    );
    let schedule =
        EpsilonSchedule::new(config.epsilon_start, config.epsilon_end, config.max_epochs)?;

    let mut metrics = Vec::with_capacity(config.max_epochs);
    let mut checkpoints = Vec::with_capacity(config.max_epochs);
    for epoch in 0..config.max_epochs {
        let epsilon = schedule.epsilon_at(epoch)?;
        let experiences = explore_epoch(
            &policy,
            &valuenet,
            &split.train,
            &split.validation,
            epsilon,
            config,
            epoch,
        )?;
        update_epoch(
            &mut policy,
            &mut valuenet,
            &experiences,
            &split.train,
            config,
            epoch,
        )?;
        metrics.push(evaluate_epoch(&policy, split, epoch, config.evaluate_test)?);
        checkpoints.push(policy.params().snapshot());
    }
    Ok(TrainRun {
        metrics,
        checkpoints,
        policy,
        value: Some(valuenet),
    })
}
