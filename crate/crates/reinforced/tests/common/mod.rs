//! Shared helpers for the integration suites: a minimal tape-based scalar
//! autodiff used as an independent gradient oracle, plus small utilities.
//!
//! The tape knows nothing about the engine's layer kernels or backward pass;
//! it re-derives gradients from scalar arithmetic, which keeps the oracle an
//! independent route to the same numbers.

#![allow(dead_code)]

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Clone, Copy)]
enum Op {
    Leaf,
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Exp(usize),
    Ln(usize),
}

/// Append-only computation tape over f64 scalars.
#[derive(Default)]
pub struct Tape {
    values: Vec<f64>,
    ops: Vec<Op>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf(&mut self, value: f64) -> Var {
        self.push(value, Op::Leaf)
    }

    fn push(&mut self, value: f64, op: Op) -> Var {
        self.values.push(value);
        self.ops.push(op);
        Var(self.values.len() - 1)
    }

    pub fn value(&self, v: Var) -> f64 {
        self.values[v.0]
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        self.push(self.values[a.0] + self.values[b.0], Op::Add(a.0, b.0))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        self.push(self.values[a.0] - self.values[b.0], Op::Sub(a.0, b.0))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        self.push(self.values[a.0] * self.values[b.0], Op::Mul(a.0, b.0))
    }

    pub fn div(&mut self, a: Var, b: Var) -> Var {
        self.push(self.values[a.0] / self.values[b.0], Op::Div(a.0, b.0))
    }

    pub fn exp(&mut self, a: Var) -> Var {
        self.push(self.values[a.0].exp(), Op::Exp(a.0))
    }

    pub fn ln(&mut self, a: Var) -> Var {
        self.push(self.values[a.0].ln(), Op::Ln(a.0))
    }

    pub fn scale(&mut self, a: Var, k: f64) -> Var {
        let kv = self.leaf(k);
        self.mul(a, kv)
    }

    pub fn sum(&mut self, vars: &[Var]) -> Var {
        let mut acc = vars[0];
        for v in &vars[1..] {
            acc = self.add(acc, *v);
        }
        acc
    }

    /// d(root)/d(node) for every node on the tape, by reverse sweep.
    pub fn gradient(&self, root: Var) -> Vec<f64> {
        let mut adj = vec![0.0; self.values.len()];
        adj[root.0] = 1.0;
        for i in (0..self.ops.len()).rev() {
            let g = adj[i];
            if g == 0.0 {
                continue;
            }
            match self.ops[i] {
                Op::Leaf => {}
                Op::Add(a, b) => {
                    adj[a] += g;
                    adj[b] += g;
                }
                Op::Sub(a, b) => {
                    adj[a] += g;
                    adj[b] -= g;
                }
                Op::Mul(a, b) => {
                    adj[a] += g * self.values[b];
                    adj[b] += g * self.values[a];
                }
                Op::Div(a, b) => {
                    adj[a] += g / self.values[b];
                    adj[b] -= g * self.values[a] / (self.values[b] * self.values[b]);
                }
                Op::Exp(a) => adj[a] += g * self.values[i],
                Op::Ln(a) => adj[a] += g / self.values[a],
            }
        }
        adj
    }

    pub fn grad_of(&self, adjoint: &[f64], v: Var) -> f64 {
        adjoint[v.0]
    }
}

/// A dense relu classifier rebuilt on the tape from flat parameter leaves.
/// Layer widths alternate dense(in, out) with relu between, softmax implied
/// by `log_prob`.
pub struct TapeNet {
    pub weights: Vec<Vec<Var>>, // [layer][out*in]
    pub biases: Vec<Vec<Var>>,  // [layer][out]
    pub widths: Vec<usize>,     // in, hidden..., classes
}

impl TapeNet {
    /// Register leaves for every parameter, reading values from slices in
    /// `(weights, biases)` per layer, row-major [out][in].
    pub fn from_params(tape: &mut Tape, widths: &[usize], params: &[(Vec<f64>, Vec<f64>)]) -> Self {
        assert_eq!(params.len(), widths.len() - 1);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for (w, b) in params {
            weights.push(w.iter().map(|&v| tape.leaf(v)).collect());
            biases.push(b.iter().map(|&v| tape.leaf(v)).collect());
        }
        TapeNet {
            weights,
            biases,
            widths: widths.to_vec(),
        }
    }

    /// log p(class | input) under the softmax head, built from scalar ops.
    pub fn log_prob(&self, tape: &mut Tape, input: &[f64], class: usize) -> Var {
        let mut acts: Vec<Var> = input.iter().map(|&v| tape.leaf(v)).collect();
        let layers = self.weights.len();
        for l in 0..layers {
            let (in_dim, out_dim) = (self.widths[l], self.widths[l + 1]);
            let mut next = Vec::with_capacity(out_dim);
            for o in 0..out_dim {
                let mut acc = self.biases[l][o];
                for (i, act) in acts.iter().enumerate().take(in_dim) {
                    let prod = tape.mul(self.weights[l][o * in_dim + i], *act);
                    acc = tape.add(acc, prod);
                }
                next.push(acc);
            }
            // Relu between layers; logits stay linear. The relu kink never
            // falls exactly on zero for generic float inputs, so max(x, 0)
            // can be expressed by gating on the forward value.
            if l + 1 < layers {
                next = next
                    .iter()
                    .map(|&z| {
                        if tape.value(z) > 0.0 {
                            z
                        } else {
                            tape.scale(z, 0.0)
                        }
                    })
                    .collect();
            }
            acts = next;
        }
        // log softmax: z_y - ln(sum exp z)
        let exps: Vec<Var> = acts.iter().map(|&z| tape.exp(z)).collect();
        let total = tape.sum(&exps);
        let ln_total = tape.ln(total);
        tape.sub(acts[class], ln_total)
    }
}

pub fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
        .fold(0.0, f64::max)
}
