use std::fmt;
use std::str::FromStr;

use super::NnError;

/// Convolution kernel edge; kernels are always 3x3 with stride 1.
pub const CONV_KERNEL: usize = 3;
/// Pooling window edge; pools are always 2x2 with stride 2.
pub const POOL_WINDOW: usize = 2;

/// One layer descriptor in a classifier network.
#[derive(Debug, Clone, PartialEq)]
pub enum LayerSpec {
    Dense { in_dim: usize, out_dim: usize },
    /// 3x3 kernels, stride 1, no padding.
    Conv2d { in_channels: usize, out_channels: usize },
    Relu,
    /// 2x2 window, stride 2; trailing odd rows/columns are dropped.
    MaxPool2d,
    /// Inverted dropout: train-mode outputs are scaled by 1/keep_prob so
    /// eval mode needs no rescaling.
    Dropout { keep_prob: f64 },
    Flatten,
    /// Max-subtracted softmax over the incoming logits; carries no weights.
    SoftmaxHead { num_classes: usize },
}

/// An ordered stack of layer descriptors ending in exactly one softmax head.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    layers: Vec<LayerSpec>,
}

/// What is statically known about the activation while walking the stack.
enum Width {
    Unknown,
    Vector(Option<usize>),
    Image(Option<usize>), // channels when known
}

impl NetworkSpec {
    pub fn new(layers: Vec<LayerSpec>) -> Result<Self, NnError> {
        validate(&layers)?;
        Ok(NetworkSpec { layers })
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    /// Width of the softmax head.
    pub fn num_classes(&self) -> usize {
        match self.layers.last() {
            Some(LayerSpec::SoftmaxHead { num_classes }) => *num_classes,
            _ => unreachable!("validated spec ends in a softmax head"),
        }
    }

    /// Walk the activation shape through the first `upto` layers for a given
    /// input shape. `upto == layers().len()` yields the output shape.
    pub fn shape_after(&self, input_shape: &[usize], upto: usize) -> Result<Vec<usize>, NnError> {
        let mut shape = input_shape.to_vec();
        for layer in &self.layers[..upto] {
            shape = layer_output_shape(layer, &shape)?;
        }
        Ok(shape)
    }

    /// Index into the activation sequence (0 = network input, k = output of
    /// layer k-1) of the feature vector consumed by the value function: the
    /// flattened output of the convolutional stack when one exists, otherwise
    /// the activation entering the final dense layer.
    pub(crate) fn penultimate_activation_index(&self) -> usize {
        if let Some(i) = self
            .layers
            .iter()
            .rposition(|l| matches!(l, LayerSpec::Flatten))
        {
            return i + 1;
        }
        self.layers
            .iter()
            .rposition(|l| matches!(l, LayerSpec::Dense { .. }))
            .unwrap_or(0)
    }

    /// Length of the feature vector paired with the class distribution in an
    /// augmented state.
    pub fn penultimate_width(&self, input_shape: &[usize]) -> Result<usize, NnError> {
        let idx = self.penultimate_activation_index();
        Ok(self.shape_after(input_shape, idx)?.iter().product())
    }
}

pub(crate) fn layer_output_shape(layer: &LayerSpec, shape: &[usize]) -> Result<Vec<usize>, NnError> {
    let mismatch = |expected: String| NnError::ShapeMismatch {
        expected,
        got: format!("{shape:?}"),
    };
    match layer {
        LayerSpec::Dense { in_dim, out_dim } => {
            if shape != [*in_dim] {
                return Err(mismatch(format!("[{in_dim}] into dense({in_dim},{out_dim})")));
            }
            Ok(vec![*out_dim])
        }
        LayerSpec::Conv2d {
            in_channels,
            out_channels,
        } => {
            let [h, w, c] = three_dims(shape).ok_or_else(|| mismatch("rank-3 image".into()))?;
            if c != *in_channels {
                return Err(mismatch(format!("{in_channels} input channels")));
            }
            if h < CONV_KERNEL || w < CONV_KERNEL {
                return Err(mismatch(format!("spatial dims of at least {CONV_KERNEL}")));
            }
            Ok(vec![h - CONV_KERNEL + 1, w - CONV_KERNEL + 1, *out_channels])
        }
        LayerSpec::Relu | LayerSpec::Dropout { .. } => Ok(shape.to_vec()),
        LayerSpec::MaxPool2d => {
            let [h, w, c] = three_dims(shape).ok_or_else(|| mismatch("rank-3 image".into()))?;
            if h < POOL_WINDOW || w < POOL_WINDOW {
                return Err(mismatch(format!("spatial dims of at least {POOL_WINDOW}")));
            }
            Ok(vec![h / POOL_WINDOW, w / POOL_WINDOW, c])
        }
        LayerSpec::Flatten => Ok(vec![shape.iter().product()]),
        LayerSpec::SoftmaxHead { num_classes } => {
            if shape != [*num_classes] {
                return Err(mismatch(format!("[{num_classes}] logits into the head")));
            }
            Ok(vec![*num_classes])
        }
    }
}

fn three_dims(shape: &[usize]) -> Option<[usize; 3]> {
    match shape {
        [h, w, c] => Some([*h, *w, *c]),
        _ => None,
    }
}

fn validate(layers: &[LayerSpec]) -> Result<(), NnError> {
    let invalid = |msg: String| Err(NnError::InvalidSpec(msg));
    if layers.is_empty() {
        return invalid("network spec has no layers".into());
    }
    let heads = layers
        .iter()
        .filter(|l| matches!(l, LayerSpec::SoftmaxHead { .. }))
        .count();
    if heads != 1 || !matches!(layers.last(), Some(LayerSpec::SoftmaxHead { .. })) {
        return invalid("spec needs exactly one softmax head, in final position".into());
    }

    let mut width = Width::Unknown;
    for (i, layer) in layers.iter().enumerate() {
        match layer {
            LayerSpec::Dense { in_dim, out_dim } => {
                if *in_dim == 0 || *out_dim == 0 {
                    return invalid(format!("layer {i}: dense dimensions must be positive"));
                }
                match width {
                    Width::Image(_) => {
                        return invalid(format!("layer {i}: dense needs a flattened input"))
                    }
                    Width::Vector(Some(n)) if n != *in_dim => {
                        return invalid(format!(
                            "layer {i}: dense expects width {in_dim} but gets {n}"
                        ))
                    }
                    _ => {}
                }
                width = Width::Vector(Some(*out_dim));
            }
            LayerSpec::Conv2d {
                in_channels,
                out_channels,
            } => {
                if *in_channels == 0 || *out_channels == 0 {
                    return invalid(format!("layer {i}: conv channels must be positive"));
                }
                match width {
                    Width::Vector(_) => {
                        return invalid(format!("layer {i}: conv2d needs an image input"))
                    }
                    Width::Image(Some(c)) if c != *in_channels => {
                        return invalid(format!(
                            "layer {i}: conv2d expects {in_channels} channels but gets {c}"
                        ))
                    }
                    _ => {}
                }
                width = Width::Image(Some(*out_channels));
            }
            LayerSpec::Relu => {}
            LayerSpec::MaxPool2d => match width {
                Width::Vector(_) => {
                    return invalid(format!("layer {i}: maxpool needs an image input"))
                }
                _ => width = Width::Image(match width {
                    Width::Image(c) => c,
                    _ => None,
                }),
            },
            LayerSpec::Dropout { keep_prob } => {
                if !(*keep_prob > 0.0 && *keep_prob <= 1.0) {
                    return invalid(format!(
                        "layer {i}: dropout keep probability must be in (0, 1], got {keep_prob}"
                    ));
                }
            }
            LayerSpec::Flatten => match width {
                Width::Image(_) | Width::Unknown => width = Width::Vector(None),
                Width::Vector(_) => {
                    return invalid(format!("layer {i}: flatten after a flat activation"))
                }
            },
            LayerSpec::SoftmaxHead { num_classes } => {
                if *num_classes < 2 {
                    return invalid(format!("layer {i}: head needs at least 2 classes"));
                }
                match width {
                    Width::Image(_) => {
                        return invalid(format!("layer {i}: head needs a flat logit vector"))
                    }
                    Width::Vector(Some(n)) if n != *num_classes => {
                        return invalid(format!(
                            "layer {i}: head expects {num_classes} logits but gets {n}"
                        ))
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(())
}

impl fmt::Display for LayerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayerSpec::Dense { in_dim, out_dim } => write!(f, "dense({in_dim},{out_dim})"),
            LayerSpec::Conv2d {
                in_channels,
                out_channels,
            } => write!(f, "conv2d({in_channels},{out_channels})"),
            LayerSpec::Relu => write!(f, "relu"),
            LayerSpec::MaxPool2d => write!(f, "maxpool"),
            LayerSpec::Dropout { keep_prob } => write!(f, "dropout({keep_prob})"),
            LayerSpec::Flatten => write!(f, "flatten"),
            LayerSpec::SoftmaxHead { num_classes } => write!(f, "softmax({num_classes})"),
        }
    }
}

impl fmt::Display for NetworkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for layer in &self.layers {
            if !first {
                write!(f, "|")?;
            }
            write!(f, "{layer}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for LayerSpec {
    type Err = NnError;

    fn from_str(s: &str) -> Result<Self, NnError> {
        let s = s.trim();
        let invalid = || NnError::InvalidSpec(format!("unrecognized layer {s:?}"));
        match s {
            "relu" => return Ok(LayerSpec::Relu),
            "maxpool" => return Ok(LayerSpec::MaxPool2d),
            "flatten" => return Ok(LayerSpec::Flatten),
            _ => {}
        }
        let (name, rest) = s.split_once('(').ok_or_else(invalid)?;
        let args = rest.strip_suffix(')').ok_or_else(invalid)?;
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        let dim = |p: &str| p.parse::<usize>().map_err(|_| invalid());
        match (name.trim(), parts.as_slice()) {
            ("dense", [a, b]) => Ok(LayerSpec::Dense {
                in_dim: dim(a)?,
                out_dim: dim(b)?,
            }),
            ("conv2d", [a, b]) => Ok(LayerSpec::Conv2d {
                in_channels: dim(a)?,
                out_channels: dim(b)?,
            }),
            ("dropout", [k]) => Ok(LayerSpec::Dropout {
                keep_prob: k.parse::<f64>().map_err(|_| invalid())?,
            }),
            ("softmax", [c]) => Ok(LayerSpec::SoftmaxHead {
                num_classes: dim(c)?,
            }),
            _ => Err(invalid()),
        }
    }
}

impl FromStr for NetworkSpec {
    type Err = NnError;

    fn from_str(s: &str) -> Result<Self, NnError> {
        let layers = s
            .split('|')
            .map(str::parse)
            .collect::<Result<Vec<LayerSpec>, _>>()?;
        NetworkSpec::new(layers)
    }
}
