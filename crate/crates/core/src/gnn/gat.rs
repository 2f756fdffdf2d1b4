use super::{Activation, GnnError, Graph};
use crate::numeric::{Matrix, NumericError};
use crate::scalar::Scalar;

pub const DEFAULT_LEAKY_SLOPE: f64 = 0.2;

/// Per-edge values, stored as each node's neighbor list in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeScores<T> {
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> EdgeScores<T> {
    pub fn from_rows(rows: Vec<Vec<(usize, T)>>) -> Self {
        Self { rows }
    }

    pub fn node_count(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.rows[i]
    }

    /// Value on edge `(i, j)`, or `None` when there is no such edge.
    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        self.rows[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .ok()
            .map(|pos| self.rows[i][pos].1)
    }

    pub fn row_sum(&self, i: usize) -> T {
        self.rows[i].iter().map(|&(_, v)| v).sum()
    }

    fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&(j, v)| (j, f(v))).collect())
                .collect(),
        }
    }
}

/// Single-head graph attention layer over borrowed weights.
///
/// `e_ij = LeakyReLU(a_src·Wh_i + a_dst·Wh_j)` on edges, `α = softmax_j(e)`,
/// `h'_i = act(Σ_j α_ij W h_j + b)`.
#[derive(Debug, Clone, Copy)]
pub struct GatLayer<'a, T> {
    pub weight: &'a Matrix<T>,
    pub att_src: &'a Matrix<T>,
    pub att_dst: &'a Matrix<T>,
    pub bias: &'a Matrix<T>,
    pub leaky_slope: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GatCache<T> {
    input: Matrix<T>,
    projected: Matrix<T>,
    raw_logits: EdgeScores<T>,
    alpha: EdgeScores<T>,
    pre_activation: Matrix<T>,
    activation: Activation,
}

impl<T: Scalar> GatCache<T> {
    pub fn attention(&self) -> &EdgeScores<T> {
        &self.alpha
    }

    /// Smallest |z| over the attention LeakyReLU inputs and, for ReLU
    /// layers, the pre-activations.
    pub fn kink_margin(&self) -> T {
        let mut m = T::infinity();
        for row in &self.raw_logits.rows {
            for &(_, u) in row {
                m = m.min(u.abs());
            }
        }
        if self.activation == Activation::Relu {
            m = self
                .pre_activation
                .as_slice()
                .iter()
                .fold(m, |m, z| m.min(z.abs()));
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GatGrads<T> {
    pub weight: Matrix<T>,
    pub att_src: Matrix<T>,
    pub att_dst: Matrix<T>,
    pub bias: Matrix<T>,
    pub input: Matrix<T>,
}

fn leaky<T: Scalar>(x: T, slope: T) -> T {
    if x > T::zero() {
        x
    } else {
        slope * x
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

impl<'a, T: Scalar> GatLayer<'a, T> {
    pub fn new(
        weight: &'a Matrix<T>,
        att_src: &'a Matrix<T>,
        att_dst: &'a Matrix<T>,
        bias: &'a Matrix<T>,
    ) -> Self {
        Self {
            weight,
            att_src,
            att_dst,
            bias,
            leaky_slope: T::of(DEFAULT_LEAKY_SLOPE),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.cols()
    }

    fn check_input(&self, graph: &Graph<T>, input: &Matrix<T>) -> Result<(), GnnError> {
        if input.cols() != self.in_dim() || input.rows() != graph.node_count() {
            return Err(NumericError::Shape {
                op: "gat_layer_forward",
                left_rows: input.rows(),
                left_cols: input.cols(),
                right_rows: self.weight.rows(),
                right_cols: self.weight.cols(),
            }
            .into());
        }
        let out = self.out_dim();
        for v in [self.att_src, self.att_dst, self.bias] {
            if v.shape() != (1, out) {
                return Err(NumericError::Shape {
                    op: "gat_layer_params",
                    left_rows: v.rows(),
                    left_cols: v.cols(),
                    right_rows: 1,
                    right_cols: out,
                }
                .into());
            }
        }
        Ok(())
    }

    /// Returns projected features `W·h` and the pre-LeakyReLU edge scores.
    fn raw_logits(
        &self,
        graph: &Graph<T>,
        input: &Matrix<T>,
    ) -> Result<(Matrix<T>, EdgeScores<T>), GnnError> {
        self.check_input(graph, input)?;
        let projected = input.matmul(self.weight)?;
        let n = graph.node_count();
        let src: Vec<T> = (0..n)
            .map(|i| dot(projected.row(i), self.att_src.as_slice()))
            .collect();
        let dst: Vec<T> = (0..n)
            .map(|i| dot(projected.row(i), self.att_dst.as_slice()))
            .collect();
        let adj = graph.adjacency();
        let rows = (0..n)
            .map(|i| {
                adj.neighbors(i)
                    .iter()
                    .map(|&j| (j, src[i] + dst[j]))
                    .collect()
            })
            .collect();
        Ok((projected, EdgeScores { rows }))
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
    ) -> Result<(Matrix<T>, GatCache<T>), GnnError> {
        let (projected, raw_logits) = self.raw_logits(graph, input)?;
        let slope = self.leaky_slope;
        let alpha = gat_attention_normalize(&raw_logits.map(|u| leaky(u, slope)));
        let n = graph.node_count();
        let out_dim = self.out_dim();
        let mut pre_activation = Matrix::zeros(n, out_dim);
        for i in 0..n {
            let row = pre_activation.row_mut(i);
            for &(j, a) in alpha.row(i) {
                for (z, &p) in row.iter_mut().zip(projected.row(j)) {
                    *z += a * p;
                }
            }
        }
        pre_activation.add_row_broadcast(self.bias)?;
        if !pre_activation.is_finite() {
            return Err(NumericError::NonFinite("gat_layer_forward").into());
        }
        let out = pre_activation.map(|v| act.apply(v));
        Ok((
            out,
            GatCache {
                input: input.clone(),
                projected,
                raw_logits,
                alpha,
                pre_activation,
                activation: act,
            },
        ))
    }

    pub fn backward(
        &self,
        cache: &GatCache<T>,
        d_out: &Matrix<T>,
    ) -> Result<GatGrads<T>, GnnError> {
        let n = cache.pre_activation.rows();
        let out_dim = self.out_dim();
        let mut d_pre = d_out.clone();
        for (d, &z) in d_pre
            .as_mut_slice()
            .iter_mut()
            .zip(cache.pre_activation.as_slice())
        {
            *d *= cache.activation.derivative(z);
        }
        let bias = d_pre.col_sums();

        let mut d_projected = Matrix::zeros(n, out_dim);
        let mut d_src = vec![T::zero(); n];
        let mut d_dst = vec![T::zero(); n];
        for i in 0..n {
            let alpha_row = cache.alpha.row(i);
            let d_row = d_pre.row(i);
            // direct path: z_i = Σ_j α_ij p_j
            let d_alpha: Vec<T> = alpha_row
                .iter()
                .map(|&(j, _)| dot(d_row, cache.projected.row(j)))
                .collect();
            for &(j, a) in alpha_row {
                for (dp, &g) in d_projected.row_mut(j).iter_mut().zip(d_row) {
                    *dp += a * g;
                }
            }
            // softmax, then LeakyReLU
            let weighted: T = alpha_row
                .iter()
                .zip(&d_alpha)
                .map(|(&(_, a), &g)| a * g)
                .sum();
            for ((&(j, a), &g), &(_, u)) in
                alpha_row.iter().zip(&d_alpha).zip(cache.raw_logits.row(i))
            {
                let d_e = a * (g - weighted);
                let d_u = if u > T::zero() {
                    d_e
                } else {
                    d_e * self.leaky_slope
                };
                d_src[i] += d_u;
                d_dst[j] += d_u;
            }
        }

        let mut att_src = Matrix::zeros(1, out_dim);
        let mut att_dst = Matrix::zeros(1, out_dim);
        for i in 0..n {
            let p = cache.projected.row(i);
            for c in 0..out_dim {
                att_src[(0, c)] += d_src[i] * p[c];
                att_dst[(0, c)] += d_dst[i] * p[c];
            }
            let (a_s, a_d) = (self.att_src.as_slice(), self.att_dst.as_slice());
            for (c, dp) in d_projected.row_mut(i).iter_mut().enumerate() {
                *dp += d_src[i] * a_s[c] + d_dst[i] * a_d[c];
            }
        }

        let weight = cache.input.t_matmul(&d_projected)?;
        let input = d_projected.matmul_t(self.weight)?;
        Ok(GatGrads {
            weight,
            att_src,
            att_dst,
            bias,
            input,
        })
    }
}

/// Edge logits `LeakyReLU(a_src·Wh_i + a_dst·Wh_j)` for every edge.
pub fn gat_attention_logits<T: Scalar>(
    layer: &GatLayer<'_, T>,
    graph: &Graph<T>,
    input: &Matrix<T>,
) -> Result<EdgeScores<T>, GnnError> {
    let slope = layer.leaky_slope;
    layer
        .raw_logits(graph, input)
        .map(|(_, e)| e.map(|u| leaky(u, slope)))
}

/// Row-wise softmax over each node's neighborhood, with max subtraction.
pub fn gat_attention_normalize<T: Scalar>(logits: &EdgeScores<T>) -> EdgeScores<T> {
    let rows = logits
        .rows
        .iter()
        .map(|row| {
            let max = row.iter().fold(T::neg_infinity(), |m, &(_, v)| m.max(v));
            let exps: Vec<(usize, T)> = row.iter().map(|&(j, v)| (j, (v - max).exp())).collect();
            let total: T = exps.iter().map(|&(_, v)| v).sum();
            exps.into_iter().map(|(j, v)| (j, v / total)).collect()
        })
        .collect();
    EdgeScores { rows }
}
