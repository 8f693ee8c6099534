//! The classifier as a policy: class-distribution inference, epsilon-greedy
//! action sampling, mirror-policy synchronization, and tilting.
//!
//! The epsilon convention is the inverted one used by the training scheme:
//! the greedy class is chosen with probability epsilon and a uniformly random
//! class otherwise, with epsilon growing over training.

use rand::Rng;
use thiserror::Error;

use crate::nn::{
    self, forward, grad_weighted_log_prob, sgd_step, Direction, Mode, NetworkSpec, NnError,
    ParameterSet, Tensor,
};
use crate::rng::Prng;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error(transparent)]
    Engine(#[from] NnError),
    #[error("epoch {epoch} outside schedule of {total_epochs} epochs")]
    EpochOutOfRange { epoch: usize, total_epochs: usize },
    #[error("invalid epsilon schedule: start {start}, end {end}")]
    InvalidSchedule { start: f64, end: f64 },
    #[error("negative tilt rate {0}")]
    NegativeRate(f64),
}

/// Anything that carries classifier parameters and their spec.
pub trait PolicyNet {
    fn params(&self) -> &ParameterSet;
    fn spec(&self) -> &NetworkSpec;
}

/// The classification model; doubles as the agent's behavior.
#[derive(Debug, Clone)]
pub struct Policy {
    params: ParameterSet,
    spec: NetworkSpec,
}

impl Policy {
    /// Fresh policy with parameters initialized from `seed`.
    pub fn new(spec: NetworkSpec, seed: u64) -> Self {
        let params = nn::build_network(&spec, seed);
        Policy { params, spec }
    }

    pub fn from_params(spec: NetworkSpec, params: ParameterSet) -> Result<Self, NnError> {
        let expected = nn::build_network(&spec, 0);
        if !expected.compatible_with(&params) {
            return Err(NnError::IncompatibleParams(
                "parameters do not match the network spec".to_string(),
            ));
        }
        Ok(Policy { params, spec })
    }

    pub fn params_mut(&mut self) -> &mut ParameterSet {
        &mut self.params
    }
}

impl PolicyNet for Policy {
    fn params(&self) -> &ParameterSet {
        &self.params
    }

    fn spec(&self) -> &NetworkSpec {
        &self.spec
    }
}

/// A disposable copy of the policy, tilted during exploration so the effect
/// of a hypothetical update can be measured without touching the policy.
#[derive(Debug, Clone)]
pub struct MirrorPolicy {
    params: ParameterSet,
    spec: NetworkSpec,
}

impl MirrorPolicy {
    /// A mirror synchronized to the given policy.
    pub fn of(policy: &Policy) -> Self {
        MirrorPolicy {
            params: policy.params.snapshot(),
            spec: policy.spec.clone(),
        }
    }

    pub fn params_mut(&mut self) -> &mut ParameterSet {
        &mut self.params
    }
}

impl PolicyNet for MirrorPolicy {
    fn params(&self) -> &ParameterSet {
        &self.params
    }

    fn spec(&self) -> &NetworkSpec {
        &self.spec
    }
}

/// Linear epsilon schedule from `start` at epoch 0 to `end` at the final
/// epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonSchedule {
    start: f64,
    end: f64,
    total_epochs: usize,
}

impl EpsilonSchedule {
    pub fn new(start: f64, end: f64, total_epochs: usize) -> Result<Self, PolicyError> {
        if !(0.0 <= start && start <= end && end <= 1.0) {
            return Err(PolicyError::InvalidSchedule { start, end });
        }
        Ok(EpsilonSchedule {
            start,
            end,
            total_epochs,
        })
    }

    /// Epsilon for a 0-based epoch.
    pub fn epsilon_at(&self, epoch: usize) -> Result<f64, PolicyError> {
        if epoch >= self.total_epochs {
            return Err(PolicyError::EpochOutOfRange {
                epoch,
                total_epochs: self.total_epochs,
            });
        }
        if self.total_epochs == 1 {
            return Ok(self.start);
        }
        let t = epoch as f64 / (self.total_epochs - 1) as f64;
        Ok(self.start + t * (self.end - self.start))
    }
}

/// Eval-mode class distribution for one input.
pub fn class_distribution(net: &impl PolicyNet, input: &Tensor) -> Result<Vec<f64>, NnError> {
    let (dist, _) = forward(net.params(), net.spec(), input, Mode::Eval, None)?;
    Ok(dist.values().to_vec())
}

/// Argmax class; ties break toward the lowest index.
pub fn greedy_class(distribution: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in distribution.iter().enumerate() {
        if p > distribution[best] {
            best = i;
        }
    }
    best
}

/// Sample a class: the greedy one with probability `epsilon`, otherwise
/// uniform over all classes (the greedy class included).
pub fn sample_action(distribution: &[f64], epsilon: f64, rng: &mut Prng) -> usize {
    debug_assert!((0.0..=1.0).contains(&epsilon));
    if rng.random::<f64>() < epsilon {
        greedy_class(distribution)
    } else {
        rng.random_range(0..distribution.len())
    }
}

/// Overwrite the mirror's parameters with the policy's. The policy is left
/// untouched.
pub fn sync_mirror(mirror: &mut MirrorPolicy, policy: &Policy) -> Result<(), NnError> {
    if mirror.spec != policy.spec {
        return Err(NnError::IncompatibleParams(
            "mirror and policy specs differ".to_string(),
        ));
    }
    mirror.params.restore_from(&policy.params)
}

/// One gradient-ascent step on `log p(class | input)` at the tilting rate,
/// raising the mirror's probability of `class` for `input`. Uses an
/// eval-mode forward, so the tilt direction is deterministic.
pub fn tilt(
    mirror: &mut MirrorPolicy,
    input: &Tensor,
    class: usize,
    rate: f64,
) -> Result<(), PolicyError> {
    if rate < 0.0 {
        return Err(PolicyError::NegativeRate(rate));
    }
    let grads = grad_weighted_log_prob(
        &mirror.params,
        &mirror.spec,
        &[(input, class, 1.0)],
        Mode::Eval,
        None,
    )?;
    sgd_step(&mut mirror.params, &grads, rate, Direction::Ascent)?;
    Ok(())
}
