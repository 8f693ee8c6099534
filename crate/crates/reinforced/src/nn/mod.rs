//! Minimal feed-forward network engine.
//!
//! Fixed layer vocabulary (dense, 3x3 conv, relu, 2x2 maxpool, inverted
//! dropout, flatten, softmax head), 64-bit precision throughout, hand-written
//! reverse-mode gradients, and plain SGD. Networks are expressed as a
//! [`NetworkSpec`] plus a [`ParameterSet`]; there is no general computation
//! graph.

pub mod layers;
mod params;
mod spec;
mod tensor;

pub use params::ParameterSet;
pub use spec::{LayerSpec, NetworkSpec, CONV_KERNEL, POOL_WINDOW};
pub use tensor::Tensor;

use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::rng::Prng;

/// Probabilities are clamped to at least this before taking logs.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("invalid network spec: {0}")]
    InvalidSpec(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },
    #[error("non-finite value produced by {0}")]
    NonFinite(String),
    #[error("label {label} out of range for {num_classes} classes")]
    LabelOutOfRange { label: usize, num_classes: usize },
    #[error("incompatible parameter sets: {0}")]
    IncompatibleParams(String),
    #[error("train-mode forward through dropout requires an rng")]
    MissingRng,
    #[error("empty batch")]
    EmptyBatch,
}

/// Forward-pass mode. Train samples dropout masks; eval applies no dropout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Which way an SGD step moves along the gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Ascent,
    Descent,
}

#[derive(Debug, Clone)]
enum LayerAux {
    None,
    Mask(Vec<f64>),
    Argmax(Vec<usize>),
}

/// Everything a backward pass needs from a forward pass: the activation
/// entering every layer, sampled dropout masks, pool winners, and the
/// feature vector consumed by augmented states.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    activations: Vec<Tensor>,
    aux: Vec<LayerAux>,
    penultimate_index: usize,
}

impl ForwardTrace {
    /// The class distribution produced by the pass.
    pub fn distribution(&self) -> &Tensor {
        self.activations.last().expect("trace has activations")
    }

    /// The feature vector entering the final dense stack (flattened conv
    /// output for conv nets, last hidden activation for dense nets).
    pub fn penultimate_features(&self) -> &[f64] {
        self.activations[self.penultimate_index].values()
    }

    #[cfg(test)]
    fn activation(&self, idx: usize) -> &Tensor {
        &self.activations[idx]
    }
}

fn weight_name(idx: usize) -> String {
    format!("layer{idx}.weight")
}

fn bias_name(idx: usize) -> String {
    format!("layer{idx}.bias")
}

pub(crate) fn xavier_limit(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

fn uniform_symmetric(rng: &mut Prng, limit: f64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|_| limit * (2.0 * rng.random::<f64>() - 1.0))
        .collect()
}

/// Initialize parameters for a spec: weights uniform in the Xavier range,
/// biases zero, drawn deterministically from `seed` in layer order.
pub fn build_network(spec: &NetworkSpec, seed: u64) -> ParameterSet {
    let mut rng = Prng::seed_from_u64(seed);
    let mut params = ParameterSet::new();
    for (i, layer) in spec.layers().iter().enumerate() {
        match layer {
            LayerSpec::Dense { in_dim, out_dim } => {
                let limit = xavier_limit(*in_dim, *out_dim);
                let w = Tensor::from_values(
                    &[*out_dim, *in_dim],
                    uniform_symmetric(&mut rng, limit, in_dim * out_dim),
                )
                .expect("validated dims");
                params.push(weight_name(i), w).expect("unique layer names");
                params
                    .push(bias_name(i), Tensor::zeros(&[*out_dim]))
                    .expect("unique layer names");
            }
            LayerSpec::Conv2d {
                in_channels,
                out_channels,
            } => {
                let fan = CONV_KERNEL * CONV_KERNEL;
                let limit = xavier_limit(in_channels * fan, out_channels * fan);
                let w = Tensor::from_values(
                    &[*out_channels, *in_channels, CONV_KERNEL, CONV_KERNEL],
                    uniform_symmetric(&mut rng, limit, out_channels * in_channels * fan),
                )
                .expect("validated dims");
                params.push(weight_name(i), w).expect("unique layer names");
                params
                    .push(bias_name(i), Tensor::zeros(&[*out_channels]))
                    .expect("unique layer names");
            }
            _ => {}
        }
    }
    params
}

fn param_pair(
    params: &ParameterSet,
    idx: usize,
) -> Result<(&Tensor, &Tensor), NnError> {
    let w = params.get(&weight_name(idx)).ok_or_else(|| {
        NnError::IncompatibleParams(format!("missing parameter {}", weight_name(idx)))
    })?;
    let b = params
        .get(&bias_name(idx))
        .ok_or_else(|| NnError::IncompatibleParams(format!("missing parameter {}", bias_name(idx))))?;
    Ok((w, b))
}

/// Run the network on one input. Returns the class distribution and the
/// trace backward needs. In train mode, dropout masks are drawn from `rng`.
pub fn forward(
    params: &ParameterSet,
    spec: &NetworkSpec,
    input: &Tensor,
    mode: Mode,
    mut rng: Option<&mut Prng>,
) -> Result<(Tensor, ForwardTrace), NnError> {
    input.check_finite("forward input")?;
    let mut activations = vec![input.clone()];
    let mut aux = Vec::with_capacity(spec.layers().len());
    for (i, layer) in spec.layers().iter().enumerate() {
        let cur = activations.last().expect("nonempty");
        let out_shape = spec::layer_output_shape(layer, cur.shape())?;
        let (values, layer_aux) = match layer {
            LayerSpec::Dense { .. } => {
                let (w, b) = param_pair(params, i)?;
                (layers::dense_forward(w, b, cur.values()), LayerAux::None)
            }
            LayerSpec::Conv2d { in_channels, .. } => {
                let (w, b) = param_pair(params, i)?;
                let (h, wd) = (cur.shape()[0], cur.shape()[1]);
                (
                    layers::conv2d_forward(w, b, cur.values(), h, wd, *in_channels),
                    LayerAux::None,
                )
            }
            LayerSpec::Relu => (layers::relu_forward(cur.values()), LayerAux::None),
            LayerSpec::MaxPool2d => {
                let (h, wd, c) = (cur.shape()[0], cur.shape()[1], cur.shape()[2]);
                let (out, argmax) = layers::maxpool_forward(cur.values(), h, wd, c);
                (out, LayerAux::Argmax(argmax))
            }
            LayerSpec::Dropout { keep_prob } => match mode {
                Mode::Eval => (cur.values().to_vec(), LayerAux::None),
                Mode::Train => {
                    if *keep_prob >= 1.0 {
                        (cur.values().to_vec(), LayerAux::Mask(vec![1.0; cur.len()]))
                    } else {
                        let r = rng.as_deref_mut().ok_or(NnError::MissingRng)?;
                        let (out, mask) = layers::dropout_forward(cur.values(), *keep_prob, r);
                        (out, LayerAux::Mask(mask))
                    }
                }
            },
            LayerSpec::Flatten => (cur.values().to_vec(), LayerAux::None),
            LayerSpec::SoftmaxHead { .. } => (layers::softmax(cur.values()), LayerAux::None),
        };
        let out = Tensor::from_values(&out_shape, values)?;
        out.check_finite(&format!("layer {i} ({layer})"))?;
        activations.push(out);
        aux.push(layer_aux);
    }
    let trace = ForwardTrace {
        activations,
        aux,
        penultimate_index: spec.penultimate_activation_index(),
    };
    Ok((trace.distribution().clone(), trace))
}

/// Backpropagate a gradient seeded at the logits entering the softmax head.
/// Returns parameter-shaped gradients; `params` is read-only.
fn backward(
    params: &ParameterSet,
    spec: &NetworkSpec,
    trace: &ForwardTrace,
    d_logits: &[f64],
) -> Result<ParameterSet, NnError> {
    let mut grads = params.zeros_like();
    let n_layers = spec.layers().len();
    // The head itself is differentiated by the caller (d_logits is already
    // the gradient at its input), so walk the layers below it.
    let mut d_cur = d_logits.to_vec();
    for i in (0..n_layers - 1).rev() {
        let layer = &spec.layers()[i];
        let input = &trace.activations[i];
        d_cur = match layer {
            LayerSpec::Dense { .. } => {
                let (w, _) = param_pair(params, i)?;
                let (d_w, d_b, d_in) = layers::dense_backward(w, input.values(), &d_cur);
                store_grad(&mut grads, i, d_w, d_b);
                d_in
            }
            LayerSpec::Conv2d { in_channels, .. } => {
                let (w, _) = param_pair(params, i)?;
                let (h, wd) = (input.shape()[0], input.shape()[1]);
                let (d_w, d_b, d_in) =
                    layers::conv2d_backward(w, input.values(), h, wd, *in_channels, &d_cur);
                store_grad(&mut grads, i, d_w, d_b);
                d_in
            }
            LayerSpec::Relu => layers::relu_backward(input.values(), &d_cur),
            LayerSpec::MaxPool2d => match &trace.aux[i] {
                LayerAux::Argmax(argmax) => {
                    layers::maxpool_backward(input.len(), argmax, &d_cur)
                }
                _ => unreachable!("pool layers record argmax"),
            },
            LayerSpec::Dropout { .. } => match &trace.aux[i] {
                LayerAux::Mask(mask) => layers::dropout_backward(mask, &d_cur),
                LayerAux::None => d_cur, // eval-mode dropout is identity
                _ => unreachable!("dropout layers record masks"),
            },
            LayerSpec::Flatten => d_cur,
            LayerSpec::SoftmaxHead { .. } => unreachable!("single head in final position"),
        };
    }
    Ok(grads)
}

fn store_grad(grads: &mut ParameterSet, idx: usize, d_w: Vec<f64>, d_b: Vec<f64>) {
    grads
        .get_mut(&weight_name(idx))
        .expect("grads mirror params")
        .values_mut()
        .copy_from_slice(&d_w);
    grads
        .get_mut(&bias_name(idx))
        .expect("grads mirror params")
        .values_mut()
        .copy_from_slice(&d_b);
}

/// Cross-entropy of a class distribution against a label:
/// -log(distribution[label]), with the probability floored at [`PROB_FLOOR`].
pub fn cross_entropy(distribution: &[f64], label: usize) -> Result<f64, NnError> {
    if label >= distribution.len() {
        return Err(NnError::LabelOutOfRange {
            label,
            num_classes: distribution.len(),
        });
    }
    debug_assert!(
        (distribution.iter().sum::<f64>() - 1.0).abs() < 1e-9,
        "cross_entropy expects a probability vector"
    );
    Ok(-distribution[label].max(PROB_FLOOR).ln())
}

/// Gradient with respect to the parameters of the batch mean of
/// `weight * log p(class | input)`. Does not mutate `params`.
///
/// With weight 1 and batch size 1 this is the tilt gradient; with advantage
/// weights it is the reinforced policy term; negated it is the cross-entropy
/// gradient.
pub fn grad_weighted_log_prob(
    params: &ParameterSet,
    spec: &NetworkSpec,
    batch: &[(&Tensor, usize, f64)],
    mode: Mode,
    mut rng: Option<&mut Prng>,
) -> Result<ParameterSet, NnError> {
    if batch.is_empty() {
        return Err(NnError::EmptyBatch);
    }
    let num_classes = spec.num_classes();
    let scale = 1.0 / batch.len() as f64;
    let mut total = params.zeros_like();
    for (input, class, weight) in batch {
        if *class >= num_classes {
            return Err(NnError::LabelOutOfRange {
                label: *class,
                num_classes,
            });
        }
        let (dist, trace) = forward(params, spec, input, mode, rng.as_deref_mut())?;
        // d log p_y / d logit_j = [j == y] - p_j
        let d_logits: Vec<f64> = dist
            .values()
            .iter()
            .enumerate()
            .map(|(j, p)| scale * weight * (if j == *class { 1.0 } else { 0.0 } - p))
            .collect();
        let grads = backward(params, spec, &trace, &d_logits)?;
        total.add_scaled(&grads, 1.0)?;
    }
    total.check_finite("log-prob gradient")?;
    Ok(total)
}

/// One plain SGD step: `params <- params +/- rate * grads`. Gradient buffers
/// inside the tensors are untouched.
pub fn sgd_step(
    params: &mut ParameterSet,
    grads: &ParameterSet,
    rate: f64,
    direction: Direction,
) -> Result<(), NnError> {
    let signed = match direction {
        Direction::Ascent => rate,
        Direction::Descent => -rate,
    };
    params.add_scaled(grads, signed)?;
    params.check_finite("sgd step")?;
    Ok(())
}

/// Gradient contribution of the L2 weight penalty: `lambda * theta` for
/// weight tensors; bias tensors are excluded.
pub fn l2_penalty_grads(params: &ParameterSet, lambda: f64) -> ParameterSet {
    assert!(lambda >= 0.0, "l2 scale must be non-negative");
    let mut grads = params.zeros_like();
    for (name, t) in grads.iter_mut() {
        if name.ends_with(".weight") {
            let src = params.get(name).expect("zeros_like mirrors params");
            for (g, v) in t.values_mut().iter_mut().zip(src.values()) {
                *g = lambda * v;
            }
        }
    }
    grads
}
