use super::NnError;

/// An n-dimensional 64-bit array with a same-shape gradient buffer.
///
/// Values are stored in row-major order. The gradient buffer is
/// zero-initialized and has the same length as the values; both must hold
/// only finite numbers after any engine operation.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    values: Vec<f64>,
    grad: Vec<f64>,
}

impl Tensor {
    /// A zero-filled tensor. Panics if any dimension is zero or the shape is
    /// empty; shapes are fixed by the network spec, so that is a programming
    /// error rather than an input error.
    pub fn zeros(shape: &[usize]) -> Self {
        assert!(
            !shape.is_empty() && shape.iter().all(|&d| d > 0),
            "tensor shape must be non-empty with positive dimensions, got {shape:?}"
        );
        let len = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            values: vec![0.0; len],
            grad: vec![0.0; len],
        }
    }

    /// Build a tensor from row-major values.
    pub fn from_values(shape: &[usize], values: Vec<f64>) -> Result<Self, NnError> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(NnError::InvalidSpec(format!(
                "tensor shape must be non-empty with positive dimensions, got {shape:?}"
            )));
        }
        let expected: usize = shape.iter().product();
        if values.len() != expected {
            return Err(NnError::ShapeMismatch {
                expected: format!("{expected} values for shape {shape:?}"),
                got: format!("{}", values.len()),
            });
        }
        let grad = vec![0.0; values.len()];
        Ok(Tensor {
            shape: shape.to_vec(),
            values,
            grad,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Total number of elements.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    pub fn grad_mut(&mut self) -> &mut [f64] {
        &mut self.grad
    }

    /// Error if any value is NaN or infinite; `context` names the operation.
    pub fn check_finite(&self, context: &str) -> Result<(), NnError> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(NnError::NonFinite(context.to_string()));
        }
        Ok(())
    }
}
