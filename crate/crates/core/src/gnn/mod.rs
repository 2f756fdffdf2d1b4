//! Graph representation and the GCN / GAT value networks.

mod gat;
mod gcn;
mod graph;
mod qnet;

use thiserror::Error;

use crate::numeric::NumericError;
use crate::scalar::Scalar;

pub use gat::{
    gat_attention_logits, gat_attention_normalize, EdgeScores, GatCache, GatGrads, GatLayer,
    DEFAULT_LEAKY_SLOPE,
};
pub use gcn::{GcnCache, GcnGrads, GcnLayer};
pub use graph::{normalize_adjacency, Adjacency, Graph};
pub use qnet::{
    ActionValues, ForwardTrace, NetworkKind, QNetwork, FEATURE_WIDTH, HIDDEN_WIDTH, NUM_ACTIONS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GnnError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("invalid adjacency: {0}")]
    Adjacency(String),
    #[error("expected {expected} feature columns, got {got}")]
    FeatureWidth { expected: usize, got: usize },
    #[error("backward called without a preceding forward pass")]
    NoForwardTrace,
    #[error("unknown network kind `{0}` (expected gcn or gat)")]
    UnknownKind(String),
}

/// Elementwise nonlinearity applied after a layer's aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    pub fn apply<T: Scalar>(self, x: T) -> T {
        match self {
            Activation::Relu => x.max(T::zero()),
            Activation::Identity => x,
        }
    }

    /// Derivative evaluated at the pre-activation value.
    pub fn derivative<T: Scalar>(self, pre: T) -> T {
        match self {
            Activation::Relu if pre > T::zero() => T::one(),
            Activation::Relu => T::zero(),
            Activation::Identity => T::one(),
        }
    }
}
