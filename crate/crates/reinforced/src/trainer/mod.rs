//! Training loops: the reinforced classifier (exploration + update phases,
//! validation-feedback reward, advantage-weighted policy updates) and the
//! supervised baselines (plain, dropout, dropout+L2), with shared per-epoch
//! metrics and optimal-epoch selection.

mod reinforced;
mod supervised;

pub use reinforced::{explore_epoch, train_reinforced, update_epoch};
pub use supervised::train_supervised;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::data::{LabeledDataset, Split};
use crate::nn::{cross_entropy, NnError, ParameterSet};
use crate::policy::{class_distribution, greedy_class, MirrorPolicy, Policy, PolicyError, PolicyNet};
use crate::value::ValueNetwork;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Engine(#[from] NnError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("empty dataset: {0}")]
    EmptyDataset(String),
    #[error("invalid train config: {0}")]
    InvalidConfig(String),
    #[error("worker pool: {0}")]
    WorkerPool(String),
}

/// One exploration record: which class was tried for which training input,
/// the loss-improvement reward, and the value estimates under the original
/// and tilted policies.
#[derive(Debug, Clone, PartialEq)]
pub struct Experience {
    /// Index into the training set.
    pub state_index: usize,
    /// The sampled class.
    pub action: usize,
    /// Training-plus-validation loss improvement caused by the tilt.
    pub reward: f64,
    /// Value of the original policy's augmented state.
    pub v_policy: f64,
    /// Value of the tilted policy's augmented state.
    pub v_tilted: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Reinforced,
    Supervised,
    Dropout,
    DropoutL2,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Method::Reinforced => "reinforced",
            Method::Supervised => "supervised",
            Method::Dropout => "dropout",
            Method::DropoutL2 => "dropout+l2",
        };
        write!(f, "{name}")
    }
}

impl FromStr for Method {
    type Err = TrainError;

    fn from_str(s: &str) -> Result<Self, TrainError> {
        match s {
            "reinforced" => Ok(Method::Reinforced),
            "supervised" => Ok(Method::Supervised),
            "dropout" => Ok(Method::Dropout),
            "dropout+l2" => Ok(Method::DropoutL2),
            other => Err(TrainError::InvalidConfig(format!(
                "unknown method {other:?}"
            ))),
        }
    }
}

/// How the true-label term of the combined policy update is weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupervisedTermWeighting {
    /// Plain cross-entropy pressure toward the true label (the default).
    Unit,
    /// Weight the true-label term by the experience advantage as well.
    Advantage,
}

/// Hyperparameters for one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub method: Method,
    /// Learning rate of the supervised baselines.
    pub supervised_rate: f64,
    /// Learning rate of the reinforced policy update.
    pub policy_rate: f64,
    /// Tilting rate of the mirror policy.
    pub tilt_rate: f64,
    /// Learning rate of the value update.
    pub value_rate: f64,
    /// Dampening factor on the true-label term of the combined update.
    pub dampening: f64,
    /// Discount on the tilted policy's value in the bootstrapped return.
    pub discount: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub minibatch_size: usize,
    pub max_epochs: usize,
    pub seed: u64,
    /// L2 penalty scale; applied only by the dropout+l2 method.
    pub l2_scale: f64,
    /// Keep probability for inserted dropout layers (harness concern; kept
    /// here so a run's manifest captures every knob).
    pub keep_prob: f64,
    /// Exploration worker threads. Results are identical for any count.
    pub workers: usize,
    pub supervised_term: SupervisedTermWeighting,
    /// Scale on the advantage-weighted term; 0 disables the reinforced term
    /// (diagnostic hook used by the cross-path consistency checks).
    pub reinforced_weight: f64,
    /// When false, test metrics are withheld from the epoch history.
    pub evaluate_test: bool,
}

impl TrainConfig {
    pub fn new(method: Method) -> Self {
        TrainConfig {
            method,
            supervised_rate: 1e-4,
            policy_rate: 1e-3,
            tilt_rate: 1e-3,
            value_rate: 1e-3,
            dampening: 0.1,
            discount: 0.9,
            epsilon_start: 0.3,
            epsilon_end: 0.7,
            minibatch_size: 16,
            max_epochs: 100,
            seed: 0,
            l2_scale: 0.1,
            keep_prob: 0.5,
            workers: 1,
            supervised_term: SupervisedTermWeighting::Unit,
            reinforced_weight: 1.0,
            evaluate_test: true,
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let positive = [
            ("supervised_rate", self.supervised_rate),
            ("policy_rate", self.policy_rate),
            ("value_rate", self.value_rate),
        ];
        for (name, v) in positive {
            if v.is_nan() || v <= 0.0 {
                return Err(TrainError::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.tilt_rate.is_nan() || self.tilt_rate < 0.0 {
            return Err(TrainError::InvalidConfig(format!(
                "tilt_rate must be non-negative, got {}",
                self.tilt_rate
            )));
        }
        if !(0.0..=1.0).contains(&self.dampening) {
            return Err(TrainError::InvalidConfig(format!(
                "dampening must lie in [0, 1], got {}",
                self.dampening
            )));
        }
        if !(0.0..=1.0).contains(&self.discount) {
            return Err(TrainError::InvalidConfig(format!(
                "discount must lie in [0, 1], got {}",
                self.discount
            )));
        }
        if !(self.keep_prob > 0.0 && self.keep_prob <= 1.0) {
            return Err(TrainError::InvalidConfig(format!(
                "keep_prob must lie in (0, 1], got {}",
                self.keep_prob
            )));
        }
        if self.minibatch_size == 0 {
            return Err(TrainError::InvalidConfig("minibatch_size must be positive".into()));
        }
        if self.max_epochs == 0 {
            return Err(TrainError::InvalidConfig("max_epochs must be positive".into()));
        }
        if self.workers == 0 {
            return Err(TrainError::InvalidConfig("workers must be positive".into()));
        }
        if self.reinforced_weight < 0.0 {
            return Err(TrainError::InvalidConfig(
                "reinforced_weight must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Eval-mode losses and accuracies recorded after each epoch. Test metrics
/// are logged but never consulted by training or selection; `None` marks a
/// withheld test set.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub test_loss: Option<f64>,
    pub train_acc: f64,
    pub val_acc: f64,
    pub test_acc: Option<f64>,
}

/// A finished run: the per-epoch history, per-epoch policy checkpoints (so
/// the optimal-epoch model is recoverable), and the final networks.
#[derive(Debug, Clone)]
pub struct TrainRun {
    pub metrics: Vec<EpochMetrics>,
    pub checkpoints: Vec<ParameterSet>,
    pub policy: Policy,
    pub value: Option<ValueNetwork>,
}

/// Mean eval-mode cross-entropy over a dataset.
pub fn dataset_loss(net: &impl PolicyNet, dataset: &LabeledDataset) -> Result<f64, TrainError> {
    if dataset.is_empty() {
        return Err(TrainError::EmptyDataset(dataset.name().to_string()));
    }
    let mut total = 0.0;
    for (input, label) in dataset.iter() {
        let dist = class_distribution(net, input)?;
        total += cross_entropy(&dist, label)?;
    }
    Ok(total / dataset.len() as f64)
}

/// Fraction of samples whose argmax class equals the label; argmax ties go to
/// the lowest class index.
pub fn dataset_accuracy(net: &impl PolicyNet, dataset: &LabeledDataset) -> Result<f64, TrainError> {
    if dataset.is_empty() {
        return Err(TrainError::EmptyDataset(dataset.name().to_string()));
    }
    let mut correct = 0usize;
    for (input, label) in dataset.iter() {
        let dist = class_distribution(net, input)?;
        if greedy_class(&dist) == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / dataset.len() as f64)
}

/// The reward formula over cached policy losses and freshly computed mirror
/// losses: summed train and validation loss improvements.
pub(crate) fn reward_from_losses(policy_losses: (f64, f64), mirror_losses: (f64, f64)) -> f64 {
    (policy_losses.0 - mirror_losses.0) + (policy_losses.1 - mirror_losses.1)
}

/// Reward of a tilted mirror: (L_T - L'_T) + (L_V - L'_V), where the policy
/// losses were cached before exploration (the policy is frozen during the
/// whole phase) and the mirror losses are evaluated here.
pub fn reward(
    mirror: &MirrorPolicy,
    train: &LabeledDataset,
    validation: &LabeledDataset,
    cached_policy_losses: (f64, f64),
) -> Result<f64, TrainError> {
    let mirror_train = dataset_loss(mirror, train)?;
    let mirror_val = dataset_loss(mirror, validation)?;
    Ok(reward_from_losses(
        cached_policy_losses,
        (mirror_train, mirror_val),
    ))
}

/// Advantage of an experience: reward + discount * v(tilted) - v(original).
pub fn advantage(experience: &Experience, discount: f64) -> f64 {
    experience.reward + discount * experience.v_tilted - experience.v_policy
}

/// Index of the epoch with the best validation accuracy; ties go to the
/// earliest epoch.
pub fn select_optimal_epoch(metrics: &[EpochMetrics]) -> Result<usize, TrainError> {
    if metrics.is_empty() {
        return Err(TrainError::EmptyDataset("epoch history".to_string()));
    }
    let mut best = 0;
    for (i, m) in metrics.iter().enumerate() {
        if m.val_acc > metrics[best].val_acc {
            best = i;
        }
    }
    Ok(best)
}

pub(crate) fn evaluate_epoch(
    policy: &Policy,
    split: &Split,
    epoch: usize,
    evaluate_test: bool,
) -> Result<EpochMetrics, TrainError> {
    let (test_loss, test_acc) = if evaluate_test {
        (
            Some(dataset_loss(policy, &split.test)?),
            Some(dataset_accuracy(policy, &split.test)?),
        )
    } else {
        (None, None)
    };
    Ok(EpochMetrics {
        epoch,
        train_loss: dataset_loss(policy, &split.train)?,
        val_loss: dataset_loss(policy, &split.validation)?,
        test_loss,
        train_acc: dataset_accuracy(policy, &split.train)?,
        val_acc: dataset_accuracy(policy, &split.validation)?,
        test_acc,
    })
}

/// Split `n` items into ceil(n / size) minibatches by random permutation,
/// without replacement.
pub(crate) fn minibatch_partition(
    n: usize,
    size: usize,
    rng: &mut crate::rng::Prng,
) -> Vec<Vec<usize>> {
    use rand::seq::SliceRandom;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.chunks(size).map(|c| c.to_vec()).collect()
}
