//! The value function over augmented states.
//!
//! An augmented state pairs the feature vector a designated policy produces
//! for an input with that policy's output class distribution, both taken from
//! the same eval-mode forward pass. The value network is a stack of two dense
//! layers ending in a single linear output.

use crate::nn::{
    self, forward, layers, Mode, NnError, ParameterSet, Tensor,
};
use crate::policy::PolicyNet;
use crate::rng::Prng;
use rand::{Rng, SeedableRng};

/// Hidden width between the two dense layers.
pub const HIDDEN_WIDTH: usize = 32;

/// Penultimate feature vector (length F) followed by the class distribution
/// (length |C|).
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedState {
    vector: Vec<f64>,
    num_classes: usize,
}

impl AugmentedState {
    pub fn vector(&self) -> &[f64] {
        &self.vector
    }

    pub fn len(&self) -> usize {
        self.vector.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vector.is_empty()
    }

    pub fn features(&self) -> &[f64] {
        &self.vector[..self.vector.len() - self.num_classes]
    }

    pub fn distribution(&self) -> &[f64] {
        &self.vector[self.vector.len() - self.num_classes..]
    }
}

/// Two dense layers with a relu between and a scalar linear output.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueNetwork {
    params: ParameterSet,
    in_width: usize,
}

impl ValueNetwork {
    /// Build for augmented states of width `in_width` (F + |C|), with weights
    /// drawn deterministically from `seed`.
    pub fn new(in_width: usize, seed: u64) -> Self {
        let mut rng = Prng::seed_from_u64(seed);
        let mut params = ParameterSet::new();
        let limit1 = nn::xavier_limit(in_width, HIDDEN_WIDTH);
        let w1: Vec<f64> = (0..HIDDEN_WIDTH * in_width)
            .map(|_| limit1 * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        params
            .push(
                "fc1.weight",
                Tensor::from_values(&[HIDDEN_WIDTH, in_width], w1).unwrap(),
            )
            .unwrap();
        params
            .push("fc1.bias", Tensor::zeros(&[HIDDEN_WIDTH]))
            .unwrap();
        let limit2 = nn::xavier_limit(HIDDEN_WIDTH, 1);
        let w2: Vec<f64> = (0..HIDDEN_WIDTH)
            .map(|_| limit2 * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        params
            .push("fc2.weight", Tensor::from_values(&[1, HIDDEN_WIDTH], w2).unwrap())
            .unwrap();
        params.push("fc2.bias", Tensor::zeros(&[1])).unwrap();
        ValueNetwork { params, in_width }
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParameterSet {
        &mut self.params
    }

    pub fn in_width(&self) -> usize {
        self.in_width
    }

    fn check_width(&self, state: &AugmentedState) -> Result<(), NnError> {
        if state.len() != self.in_width {
            return Err(NnError::ShapeMismatch {
                expected: format!("augmented state of width {}", self.in_width),
                got: format!("{}", state.len()),
            });
        }
        Ok(())
    }

    // Forward pass returning the scalar and the intermediates backward needs.
    fn forward_cached(&self, state: &AugmentedState) -> (f64, Vec<f64>, Vec<f64>) {
        let w1 = self.params.get("fc1.weight").unwrap();
        let b1 = self.params.get("fc1.bias").unwrap();
        let w2 = self.params.get("fc2.weight").unwrap();
        let b2 = self.params.get("fc2.bias").unwrap();
        let pre = layers::dense_forward(w1, b1, state.vector());
        let hidden = layers::relu_forward(&pre);
        let out = layers::dense_forward(w2, b2, &hidden);
        (out[0], pre, hidden)
    }
}

/// Augmented state of `net` for `input`: features and distribution from one
/// eval-mode forward pass. A pure function of the parameters and the input.
pub fn augmented_state(net: &impl PolicyNet, input: &Tensor) -> Result<AugmentedState, NnError> {
    let (dist, trace) = forward(net.params(), net.spec(), input, Mode::Eval, None)?;
    let mut vector = trace.penultimate_features().to_vec();
    vector.extend_from_slice(dist.values());
    Ok(AugmentedState {
        vector,
        num_classes: dist.len(),
    })
}

/// Scalar value of an augmented state.
pub fn value(net: &ValueNetwork, state: &AugmentedState) -> Result<f64, NnError> {
    net.check_width(state)?;
    let (v, _, _) = net.forward_cached(state);
    if !v.is_finite() {
        return Err(NnError::NonFinite("value forward".to_string()));
    }
    Ok(v)
}

/// One descent step on the mean squared error between the network's outputs
/// and fixed targets. Targets are constants: no gradient flows through them.
pub fn value_update(
    net: &mut ValueNetwork,
    batch: &[(AugmentedState, f64)],
    rate: f64,
) -> Result<(), NnError> {
    if batch.is_empty() {
        return Err(NnError::EmptyBatch);
    }
    for (state, target) in batch {
        net.check_width(state)?;
        if !target.is_finite() {
            return Err(NnError::NonFinite("value target".to_string()));
        }
    }
    let scale = 1.0 / batch.len() as f64;
    let mut grads = net.params.zeros_like();
    for (state, target) in batch {
        let (v, pre, hidden) = net.forward_cached(state);
        let d_out = vec![2.0 * scale * (v - target)];
        let w2 = net.params.get("fc2.weight").unwrap();
        let (d_w2, d_b2, d_hidden) = layers::dense_backward(w2, &hidden, &d_out);
        let d_pre = layers::relu_backward(&pre, &d_hidden);
        let w1 = net.params.get("fc1.weight").unwrap();
        let (d_w1, d_b1, _) = layers::dense_backward(w1, state.vector(), &d_pre);
        accumulate(&mut grads, "fc1.weight", &d_w1);
        accumulate(&mut grads, "fc1.bias", &d_b1);
        accumulate(&mut grads, "fc2.weight", &d_w2);
        accumulate(&mut grads, "fc2.bias", &d_b2);
    }
    nn::sgd_step(&mut net.params, &grads, rate, nn::Direction::Descent)
}

fn accumulate(grads: &mut ParameterSet, name: &str, delta: &[f64]) {
    for (g, d) in grads
        .get_mut(name)
        .expect("value param names are fixed")
        .values_mut()
        .iter_mut()
        .zip(delta)
    {
        *g += d;
    }
}
