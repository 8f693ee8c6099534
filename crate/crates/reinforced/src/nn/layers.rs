//! Raw layer kernels over flat row-major buffers.
//!
//! Images are laid out `[H][W][C]`: index `(r, c, ch) = (r*w + c)*channels + ch`.
//! Dense weights are `[out][in]` row-major; conv weights `[out_ch][in_ch][3][3]`.
//! Forward functions return fresh buffers; backward functions return
//! `(d_weights, d_bias, d_input)` or the input gradient alone.

use rand::Rng;

use super::spec::{CONV_KERNEL, POOL_WINDOW};
use super::Tensor;
use crate::rng::Prng;

pub fn dense_forward(weights: &Tensor, bias: &Tensor, input: &[f64]) -> Vec<f64> {
    let out_dim = weights.shape()[0];
    let in_dim = weights.shape()[1];
    debug_assert_eq!(input.len(), in_dim);
    let w = weights.values();
    let b = bias.values();
    let mut out = vec![0.0; out_dim];
    for (o, y) in out.iter_mut().enumerate() {
        let row = &w[o * in_dim..(o + 1) * in_dim];
        let mut acc = b[o];
        for (wi, xi) in row.iter().zip(input) {
            acc += wi * xi;
        }
        *y = acc;
    }
    out
}

#[allow(clippy::needless_range_loop)]
pub fn dense_backward(
    weights: &Tensor,
    input: &[f64],
    d_out: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let out_dim = weights.shape()[0];
    let in_dim = weights.shape()[1];
    let w = weights.values();
    let mut d_w = vec![0.0; out_dim * in_dim];
    let mut d_in = vec![0.0; in_dim];
    for o in 0..out_dim {
        let dy = d_out[o];
        let row = o * in_dim;
        for i in 0..in_dim {
            d_w[row + i] = dy * input[i];
            d_in[i] += w[row + i] * dy;
        }
    }
    (d_w, d_out.to_vec(), d_in)
}

pub fn conv2d_forward(
    weights: &Tensor,
    bias: &Tensor,
    input: &[f64],
    h: usize,
    w: usize,
    in_ch: usize,
) -> Vec<f64> {
    let out_ch = weights.shape()[0];
    let (oh, ow) = (h - CONV_KERNEL + 1, w - CONV_KERNEL + 1);
    let wv = weights.values();
    let b = bias.values();
    let mut out = vec![0.0; oh * ow * out_ch];
    for r in 0..oh {
        for c in 0..ow {
            for o in 0..out_ch {
                let mut acc = b[o];
                for dr in 0..CONV_KERNEL {
                    for dc in 0..CONV_KERNEL {
                        let px = ((r + dr) * w + (c + dc)) * in_ch;
                        for i in 0..in_ch {
                            acc += wv[((o * in_ch + i) * CONV_KERNEL + dr) * CONV_KERNEL + dc]
                                * input[px + i];
                        }
                    }
                }
                out[(r * ow + c) * out_ch + o] = acc;
            }
        }
    }
    out
}

pub fn conv2d_backward(
    weights: &Tensor,
    input: &[f64],
    h: usize,
    w: usize,
    in_ch: usize,
    d_out: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let out_ch = weights.shape()[0];
    let (oh, ow) = (h - CONV_KERNEL + 1, w - CONV_KERNEL + 1);
    let wv = weights.values();
    let mut d_w = vec![0.0; weights.len()];
    let mut d_b = vec![0.0; out_ch];
    let mut d_in = vec![0.0; input.len()];
    for r in 0..oh {
        for c in 0..ow {
            for o in 0..out_ch {
                let dy = d_out[(r * ow + c) * out_ch + o];
                d_b[o] += dy;
                for dr in 0..CONV_KERNEL {
                    for dc in 0..CONV_KERNEL {
                        let px = ((r + dr) * w + (c + dc)) * in_ch;
                        for i in 0..in_ch {
                            let k = ((o * in_ch + i) * CONV_KERNEL + dr) * CONV_KERNEL + dc;
                            d_w[k] += dy * input[px + i];
                            d_in[px + i] += dy * wv[k];
                        }
                    }
                }
            }
        }
    }
    (d_w, d_b, d_in)
}

pub fn relu_forward(input: &[f64]) -> Vec<f64> {
    input.iter().map(|&x| x.max(0.0)).collect()
}

pub fn relu_backward(input: &[f64], d_out: &[f64]) -> Vec<f64> {
    input
        .iter()
        .zip(d_out)
        .map(|(&x, &dy)| if x > 0.0 { dy } else { 0.0 })
        .collect()
}

/// Returns the pooled values and, per output cell, the flat input index that
/// won the window (first occurrence wins ties, scanning rows then columns).
pub fn maxpool_forward(input: &[f64], h: usize, w: usize, ch: usize) -> (Vec<f64>, Vec<usize>) {
    let (oh, ow) = (h / POOL_WINDOW, w / POOL_WINDOW);
    let mut out = vec![0.0; oh * ow * ch];
    let mut argmax = vec![0usize; oh * ow * ch];
    for r in 0..oh {
        for c in 0..ow {
            for k in 0..ch {
                let mut best_idx = (r * POOL_WINDOW * w + c * POOL_WINDOW) * ch + k;
                let mut best = input[best_idx];
                for dr in 0..POOL_WINDOW {
                    for dc in 0..POOL_WINDOW {
                        let idx = ((r * POOL_WINDOW + dr) * w + (c * POOL_WINDOW + dc)) * ch + k;
                        if input[idx] > best {
                            best = input[idx];
                            best_idx = idx;
                        }
                    }
                }
                let o = (r * ow + c) * ch + k;
                out[o] = best;
                argmax[o] = best_idx;
            }
        }
    }
    (out, argmax)
}

pub fn maxpool_backward(input_len: usize, argmax: &[usize], d_out: &[f64]) -> Vec<f64> {
    let mut d_in = vec![0.0; input_len];
    for (&src, &dy) in argmax.iter().zip(d_out) {
        d_in[src] += dy;
    }
    d_in
}

/// Sample an inverted-dropout mask and apply it. Mask entries are either 0 or
/// 1/keep_prob, so applying the mask is the whole train-mode transform.
/// keep_prob 1 is an exact no-op and must not consume rng draws, so that runs
/// configured with and without dropout stay stream-aligned.
pub fn dropout_forward(input: &[f64], keep_prob: f64, rng: &mut Prng) -> (Vec<f64>, Vec<f64>) {
    if keep_prob >= 1.0 {
        return (input.to_vec(), vec![1.0; input.len()]);
    }
    let scale = 1.0 / keep_prob;
    let mask: Vec<f64> = input
        .iter()
        .map(|_| {
            if rng.random::<f64>() < keep_prob {
                scale
            } else {
                0.0
            }
        })
        .collect();
    (dropout_apply(input, &mask), mask)
}

pub fn dropout_apply(input: &[f64], mask: &[f64]) -> Vec<f64> {
    input.iter().zip(mask).map(|(x, m)| x * m).collect()
}

pub fn dropout_backward(mask: &[f64], d_out: &[f64]) -> Vec<f64> {
    d_out.iter().zip(mask).map(|(dy, m)| dy * m).collect()
}

/// Max-subtracted softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}
