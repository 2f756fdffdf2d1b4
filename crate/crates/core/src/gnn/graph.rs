use std::sync::Arc;

use crate::numeric::{Matrix, NumericError};
use crate::scalar::Scalar;

use super::GnnError;

/// Symmetric binary adjacency with self-loops, plus the derived neighbor
/// lists and symmetric normalization. Shared between graphs via `Arc`.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjacency {
    n: usize,
    mask: Vec<bool>,
    neighbors: Vec<Vec<usize>>,
    normalized: Matrix<f64>,
}

impl Adjacency {
    /// Validates symmetry and self-loops.
    pub fn from_mask(n: usize, mask: Vec<bool>) -> Result<Self, GnnError> {
        if mask.len() != n * n {
            return Err(GnnError::Adjacency(format!(
                "mask has {} entries, expected {}",
                mask.len(),
                n * n
            )));
        }
        for i in 0..n {
            if !mask[i * n + i] {
                return Err(GnnError::Adjacency(format!("node {i} lacks a self-loop")));
            }
            for j in (i + 1)..n {
                if mask[i * n + j] != mask[j * n + i] {
                    return Err(GnnError::Adjacency(format!(
                        "edge ({i},{j}) is not symmetric"
                    )));
                }
            }
        }
        let neighbors = (0..n)
            .map(|i| (0..n).filter(|&j| mask[i * n + j]).collect())
            .collect();
        let normalized = normalize_adjacency_mask(n, &mask);
        Ok(Self {
            n,
            mask,
            neighbors,
            normalized,
        })
    }

    pub fn fully_connected(n: usize) -> Self {
        Self::from_mask(n, vec![true; n * n]).expect("complete graph is valid")
    }

    /// Path `0 - 1 - … - (n-1)` with self-loops.
    pub fn path(n: usize) -> Self {
        let mut mask = vec![false; n * n];
        for i in 0..n {
            mask[i * n + i] = true;
            if i + 1 < n {
                mask[i * n + i + 1] = true;
                mask[(i + 1) * n + i] = true;
            }
        }
        Self::from_mask(n, mask).expect("path graph is valid")
    }

    /// Builds from an undirected edge list; self-loops are added.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GnnError> {
        let mut mask = vec![false; n * n];
        for i in 0..n {
            mask[i * n + i] = true;
        }
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(GnnError::Adjacency(format!(
                    "edge ({a},{b}) out of range for {n} nodes"
                )));
            }
            mask[a * n + b] = true;
            mask[b * n + a] = true;
        }
        Self::from_mask(n, mask)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.n + j]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Neighbors of `i` (including `i` itself), ascending.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    /// `D^{-1/2} A D^{-1/2}`.
    pub fn normalized(&self) -> &Matrix<f64> {
        &self.normalized
    }

    pub fn is_complete(&self) -> bool {
        self.mask.iter().all(|&b| b)
    }

    /// Relabels nodes so that new node `k` is old node `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut mask = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                mask[a * n + b] = self.mask[perm[a] * n + perm[b]];
            }
        }
        Self::from_mask(n, mask).expect("permutation preserves validity")
    }
}

fn normalize_adjacency_mask(n: usize, mask: &[bool]) -> Matrix<f64> {
    let degree: Vec<f64> = (0..n)
        .map(|i| mask[i * n..(i + 1) * n].iter().filter(|&&b| b).count() as f64)
        .collect();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if mask[i * n + j] {
                out[(i, j)] = 1.0 / (degree[i] * degree[j]).sqrt();
            }
        }
    }
    out
}

/// Symmetric normalization of a binary adjacency matrix with self-loops:
/// entry `(i, j)` becomes `A_ij / √(d_i d_j)`.
pub fn normalize_adjacency<T: Scalar>(adjacency: &Matrix<T>) -> Result<Matrix<T>, GnnError> {
    let n = adjacency.rows();
    if adjacency.cols() != n {
        return Err(GnnError::Adjacency(format!(
            "adjacency must be square, got {}x{}",
            n,
            adjacency.cols()
        )));
    }
    let mask: Vec<bool> = adjacency
        .as_slice()
        .iter()
        .map(|&v| v != T::zero())
        .collect();
    let adj = Adjacency::from_mask(n, mask)?;
    Ok(adj.normalized.cast())
}

/// One graph: node features plus a shared adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph<T> {
    features: Matrix<T>,
    adjacency: Arc<Adjacency>,
}

impl<T: Scalar> Graph<T> {
    pub fn new(features: Matrix<T>, adjacency: Arc<Adjacency>) -> Result<Self, GnnError> {
        if features.rows() != adjacency.node_count() {
            return Err(GnnError::Numeric(NumericError::Shape {
                op: "graph",
                left_rows: features.rows(),
                left_cols: features.cols(),
                right_rows: adjacency.node_count(),
                right_cols: adjacency.node_count(),
            }));
        }
        if features.rows() == 0 {
            return Err(GnnError::Adjacency("graph needs at least one node".into()));
        }
        Ok(Self {
            features,
            adjacency,
        })
    }

    pub fn fully_connected(features: Matrix<T>) -> Self {
        let n = features.rows();
        Self::new(features, Arc::new(Adjacency::fully_connected(n))).expect("sizes agree")
    }

    pub fn node_count(&self) -> usize {
        self.features.rows()
    }

    pub fn features(&self) -> &Matrix<T> {
        &self.features
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn shared_adjacency(&self) -> &Arc<Adjacency> {
        &self.adjacency
    }

    /// Normalized adjacency in this graph's scalar type.
    pub fn normalized_adjacency(&self) -> Matrix<T> {
        self.adjacency.normalized().cast()
    }

    /// Node `k` of the result is node `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.node_count());
        let cols = self.features.cols();
        let mut data = Vec::with_capacity(self.features.len());
        for &p in perm {
            data.extend_from_slice(self.features.row(p));
        }
        Self {
            features: Matrix::from_vec(perm.len(), cols, data).expect("same shape"),
            adjacency: Arc::new(self.adjacency.permuted(perm)),
        }
    }
}
