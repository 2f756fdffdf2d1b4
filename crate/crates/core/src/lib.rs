//! Graph-network deep Q-learning for a simplified football environment.
//!
//! The dense kernels ([`numeric`]) and the graph layers ([`gnn`]) are generic
//! over [`Scalar`]; the training stack runs on `f64` through the aliases
//! below.

pub mod dqn;
pub mod env;
pub mod gnn;
pub mod gradcheck;
pub mod numeric;
pub mod obs;
pub mod pitch;
pub mod scalar;

pub use scalar::Scalar;

pub type Matrix = numeric::Matrix<f64>;
pub type ParamSet = numeric::ParamSet<f64>;
pub type AdamState = numeric::AdamState<f64>;
pub type Graph = gnn::Graph<f64>;
pub type QNetwork = gnn::QNetwork<f64>;
pub type ActionValues = gnn::ActionValues<f64>;

pub type Matrix32 = numeric::Matrix<f32>;
pub type Graph32 = gnn::Graph<f32>;
pub type QNetwork32 = gnn::QNetwork<f32>;
