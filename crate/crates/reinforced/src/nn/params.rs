use super::{NnError, Tensor};

/// An ordered, uniquely named collection of parameter tensors.
///
/// Gradient results share this type: a "parameter-shaped" set carries the
/// gradient numbers in its tensors' values. Two sets built from the same
/// network spec are element-wise compatible.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParameterSet {
    entries: Vec<(String, Tensor)>,
}

impl ParameterSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a named tensor; names must be unique within the set.
    pub fn push(&mut self, name: impl Into<String>, tensor: Tensor) -> Result<(), NnError> {
        let name = name.into();
        if self.entries.iter().any(|(n, _)| *n == name) {
            return Err(NnError::IncompatibleParams(format!(
                "duplicate parameter name {name:?}"
            )));
        }
        self.entries.push((name, tensor));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor)> {
        self.entries.iter().map(|(n, t)| (n.as_str(), t))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&str, &mut Tensor)> {
        self.entries.iter_mut().map(|(n, t)| (n.as_str(), t))
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Tensor> {
        self.entries
            .iter_mut()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    /// A same-shape set with all values zero, e.g. a gradient accumulator.
    pub fn zeros_like(&self) -> ParameterSet {
        ParameterSet {
            entries: self
                .entries
                .iter()
                .map(|(n, t)| (n.clone(), Tensor::zeros(t.shape())))
                .collect(),
        }
    }

    /// Same names, order, and shapes.
    pub fn compatible_with(&self, other: &ParameterSet) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(other.entries.iter())
                .all(|((an, at), (bn, bt))| an == bn && at.shape() == bt.shape())
    }

    /// `self += factor * other`, element-wise over all tensors.
    pub fn add_scaled(&mut self, other: &ParameterSet, factor: f64) -> Result<(), NnError> {
        if !self.compatible_with(other) {
            return Err(NnError::IncompatibleParams(
                "add_scaled over mismatched parameter sets".to_string(),
            ));
        }
        for ((_, dst), (_, src)) in self.entries.iter_mut().zip(other.entries.iter()) {
            for (d, s) in dst.values_mut().iter_mut().zip(src.values()) {
                *d += factor * s;
            }
        }
        Ok(())
    }

    /// Deep value copy of the whole set.
    pub fn snapshot(&self) -> ParameterSet {
        self.clone()
    }

    /// Overwrite this set's state with a snapshot's. The two sets must be
    /// shape-compatible.
    pub fn restore_from(&mut self, snapshot: &ParameterSet) -> Result<(), NnError> {
        if !self.compatible_with(snapshot) {
            return Err(NnError::IncompatibleParams(
                "restore from an incompatible snapshot".to_string(),
            ));
        }
        self.entries.clone_from(&snapshot.entries);
        Ok(())
    }

    pub fn check_finite(&self, context: &str) -> Result<(), NnError> {
        for (name, t) in self.iter() {
            t.check_finite(&format!("{context} ({name})"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_set() -> ParameterSet {
        let mut p = ParameterSet::new();
        let mut w = Tensor::zeros(&[2, 2]);
        w.values_mut().copy_from_slice(&[1.0, 2.0, 3.0, 4.0]);
        p.push("layer0.weight", w).unwrap();
        p.push("layer0.bias", Tensor::zeros(&[2])).unwrap();
        p
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let mut p = sample_set();
        let err = p.push("layer0.bias", Tensor::zeros(&[2])).unwrap_err();
        assert!(matches!(err, NnError::IncompatibleParams(_)));
    }

    #[test]
    fn snapshot_then_mutate_then_restore_is_exact() {
        let mut p = sample_set();
        let snap = p.snapshot();
        p.get_mut("layer0.weight").unwrap().values_mut()[0] = 99.0;
        assert_ne!(p, snap);
        p.restore_from(&snap).unwrap();
        assert_eq!(p, snap);
    }

    #[test]
    fn snapshot_of_snapshot_equals_snapshot() {
        let p = sample_set();
        let s1 = p.snapshot();
        let s2 = s1.snapshot();
        assert_eq!(s1, s2);
    }

    #[test]
    fn snapshot_is_isolated_from_the_source() {
        let mut p = sample_set();
        let snap = p.snapshot();
        p.get_mut("layer0.weight").unwrap().values_mut()[0] = -5.0;
        assert_eq!(snap.get("layer0.weight").unwrap().values()[0], 1.0);
    }

    #[test]
    fn restore_rejects_incompatible_shapes() {
        let mut p = sample_set();
        let mut other = ParameterSet::new();
        other.push("layer0.weight", Tensor::zeros(&[3])).unwrap();
        assert!(p.restore_from(&other).is_err());
    }

    #[test]
    fn add_scaled_accumulates() {
        let mut p = sample_set();
        let q = p.snapshot();
        p.add_scaled(&q, 0.5).unwrap();
        assert_eq!(p.get("layer0.weight").unwrap().values()[3], 6.0);
    }
}
