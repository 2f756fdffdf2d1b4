use super::{Activation, GnnError, Graph};
use crate::numeric::{Matrix, NumericError};
use crate::scalar::Scalar;

/// Graph convolution `act(Â · H · W + b)` over borrowed weights.
#[derive(Debug, Clone, Copy)]
pub struct GcnLayer<'a, T> {
    pub weight: &'a Matrix<T>,
    pub bias: &'a Matrix<T>,
}

/// Intermediates kept for the backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct GcnCache<T> {
    aggregated: Matrix<T>,
    pre_activation: Matrix<T>,
    activation: Activation,
}

impl<T: Scalar> GcnCache<T> {
    /// Smallest |z| over pre-activations that pass through a kink.
    pub fn kink_margin(&self) -> T {
        match self.activation {
            Activation::Relu => self
                .pre_activation
                .as_slice()
                .iter()
                .fold(T::infinity(), |m, z| m.min(z.abs())),
            Activation::Identity => T::infinity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcnGrads<T> {
    pub weight: Matrix<T>,
    pub bias: Matrix<T>,
    pub input: Matrix<T>,
}

impl<'a, T: Scalar> GcnLayer<'a, T> {
    pub fn new(weight: &'a Matrix<T>, bias: &'a Matrix<T>) -> Self {
        Self { weight, bias }
    }

    pub fn in_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.cols()
    }

    pub fn forward(
        &self,
        graph: &Graph<T>,
        input: &Matrix<T>,
        act: Activation,
    ) -> Result<Matrix<T>, GnnError> {
        self.forward_cached(graph, input, act).map(|(out, _)| out)
    }

    pub fn forward_cached(
        &self,
        graph: &Graph<T>,
        input: &Matrix<T>,
        act: Activation,
    ) -> Result<(Matrix<T>, GcnCache<T>), GnnError> {
        if input.cols() != self.in_dim() || input.rows() != graph.node_count() {
            return Err(NumericError::Shape {
                op: "gcn_layer_forward",
                left_rows: input.rows(),
                left_cols: input.cols(),
                right_rows: self.weight.rows(),
                right_cols: self.weight.cols(),
            }
            .into());
        }
        let aggregated = graph.normalized_adjacency().matmul(input)?;
        let mut pre_activation = aggregated.matmul(self.weight)?;
        pre_activation.add_row_broadcast(self.bias)?;
        let out = pre_activation.map(|v| act.apply(v));
        Ok((
            out,
            GcnCache {
                aggregated,
                pre_activation,
                activation: act,
            },
        ))
    }

    pub fn backward(
        &self,
        graph: &Graph<T>,
        cache: &GcnCache<T>,
        d_out: &Matrix<T>,
    ) -> Result<GcnGrads<T>, GnnError> {
        let mut d_pre = d_out.clone();
        for (d, &z) in d_pre
            .as_mut_slice()
            .iter_mut()
            .zip(cache.pre_activation.as_slice())
        {
            *d *= cache.activation.derivative(z);
        }
        let weight = cache.aggregated.t_matmul(&d_pre)?;
        let bias = d_pre.col_sums();
        let d_aggregated = d_pre.matmul_t(self.weight)?;
        // Â is symmetric, so Âᵀ·dA = Â·dA.
        let input = graph.normalized_adjacency().matmul(&d_aggregated)?;
        Ok(GcnGrads {
            weight,
            bias,
            input,
        })
    }
}
