use super::{Matrix, NumericError};
use crate::scalar::Scalar;

/// Index of a parameter inside its [`ParamSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamId(pub usize);

/// A named parameter with a same-shaped gradient accumulator.
#[derive(Debug, Clone, PartialEq)]
pub struct Param<T> {
    pub name: String,
    pub value: Matrix<T>,
    pub grad: Matrix<T>,
}

/// Ordered collection of named parameters. Iteration order is insertion
/// order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamSet<T> {
    entries: Vec<Param<T>>,
}

impl<T: Scalar> ParamSet<T> {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    pub fn add(
        &mut self,
        name: impl Into<String>,
        value: Matrix<T>,
    ) -> Result<ParamId, NumericError> {
        let name = name.into();
        if self.entries.iter().any(|p| p.name == name) {
            return Err(NumericError::DuplicateParam(name));
        }
        let (rows, cols) = value.shape();
        self.entries.push(Param {
            name,
            value,
            grad: Matrix::zeros(rows, cols),
        });
        Ok(ParamId(self.entries.len() - 1))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of scalar coordinates.
    pub fn num_scalars(&self) -> usize {
        self.entries.iter().map(|p| p.value.len()).sum()
    }

    pub fn id(&self, name: &str) -> Option<ParamId> {
        self.entries
            .iter()
            .position(|p| p.name == name)
            .map(ParamId)
    }

    pub fn get(&self, name: &str) -> Option<&Param<T>> {
        self.entries.iter().find(|p| p.name == name)
    }

    pub fn value(&self, id: ParamId) -> &Matrix<T> {
        &self.entries[id.0].value
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut Matrix<T> {
        &mut self.entries[id.0].value
    }

    pub fn grad(&self, id: ParamId) -> &Matrix<T> {
        &self.entries[id.0].grad
    }

    pub fn grad_mut(&mut self, id: ParamId) -> &mut Matrix<T> {
        &mut self.entries[id.0].grad
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Param<T>> {
        self.entries.iter()
    }

    pub fn iter_mut(&mut self) -> std::slice::IterMut<'_, Param<T>> {
        self.entries.iter_mut()
    }

    pub fn zero_grads(&mut self) {
        for p in &mut self.entries {
            p.grad.fill(T::zero());
        }
    }

    /// Gradients in parameter order.
    pub fn grads(&self) -> Vec<Matrix<T>> {
        self.entries.iter().map(|p| p.grad.clone()).collect()
    }

    /// True when both sets have the same names and shapes in the same order.
    pub fn same_layout(&self, other: &Self) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.name == b.name && a.value.shape() == b.value.shape())
    }

    /// Copies parameter values (not gradients) from a set with the same layout.
    pub fn copy_values_from(&mut self, other: &Self) -> Result<(), NumericError> {
        if !self.same_layout(other) {
            return Err(NumericError::Config(
                "parameter layouts differ; cannot copy values".into(),
            ));
        }
        for (dst, src) in self.entries.iter_mut().zip(&other.entries) {
            dst.value
                .as_mut_slice()
                .copy_from_slice(src.value.as_slice());
        }
        Ok(())
    }
}
