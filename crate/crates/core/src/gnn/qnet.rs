use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Activation, GatCache, GatLayer, GcnCache, GcnLayer, GnnError, Graph};
use crate::numeric::{xavier_init, Matrix, ParamId, ParamSet};
use crate::scalar::Scalar;

/// Node feature width expected by the first layer.
pub const FEATURE_WIDTH: usize = 9;
pub const HIDDEN_WIDTH: usize = 32;
/// Size of the football action set.
pub const NUM_ACTIONS: usize = 19;

pub type ActionValues<T> = [T; NUM_ACTIONS];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    Gcn,
    Gat,
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NetworkKind::Gcn => "gcn",
            NetworkKind::Gat => "gat",
        })
    }
}

impl FromStr for NetworkKind {
    type Err = GnnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gcn" => Ok(NetworkKind::Gcn),
            "gat" => Ok(NetworkKind::Gat),
            _ => Err(GnnError::UnknownKind(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum LayerIds {
    Gcn {
        weight: ParamId,
        bias: ParamId,
    },
    Gat {
        weight: ParamId,
        att_src: ParamId,
        att_dst: ParamId,
        bias: ParamId,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Layout {
    layers: [LayerIds; 2],
    readout_weight: ParamId,
    readout_bias: ParamId,
}

#[derive(Debug, Clone, PartialEq)]
enum LayerCache<T> {
    Gcn(GcnCache<T>),
    Gat(GatCache<T>),
}

/// Intermediates of one forward pass, consumed by the backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace<T> {
    graph: Graph<T>,
    caches: [LayerCache<T>; 2],
    pooled: Matrix<T>,
    values: ActionValues<T>,
}

impl<T: Scalar> ForwardTrace<T> {
    pub fn values(&self) -> &ActionValues<T> {
        &self.values
    }

    /// Distance of the nearest non-smooth point in this pass. Finite
    /// differences with a step well below it stay on one linear piece.
    pub fn kink_margin(&self) -> T {
        self.caches.iter().fold(T::infinity(), |m, c| {
            m.min(match c {
                LayerCache::Gcn(c) => c.kink_margin(),
                LayerCache::Gat(c) => c.kink_margin(),
            })
        })
    }
}

/// Two graph layers (9→32→32), mean pooling over nodes and an affine
/// readout to 19 action values.
#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork<T> {
    kind: NetworkKind,
    params: ParamSet<T>,
    layout: Layout,
    pending: Option<ForwardTrace<T>>,
}

const ACTIVATIONS: [Activation; 2] = [Activation::Relu, Activation::Identity];
const DIMS: [(usize, usize); 2] = [(FEATURE_WIDTH, HIDDEN_WIDTH), (HIDDEN_WIDTH, HIDDEN_WIDTH)];

/// Parameter names and shapes for a network kind, in storage order.
fn param_spec(kind: NetworkKind) -> Vec<(String, usize, usize, bool)> {
    let mut spec = Vec::new();
    for (l, &(i, o)) in DIMS.iter().enumerate() {
        let p = format!("layer{}", l + 1);
        spec.push((format!("{p}.weight"), i, o, true));
        if kind == NetworkKind::Gat {
            spec.push((format!("{p}.att_src"), 1, o, true));
            spec.push((format!("{p}.att_dst"), 1, o, true));
        }
        spec.push((format!("{p}.bias"), 1, o, false));
    }
    spec.push(("readout.weight".into(), HIDDEN_WIDTH, NUM_ACTIONS, true));
    spec.push(("readout.bias".into(), 1, NUM_ACTIONS, false));
    spec
}

fn layout_for(kind: NetworkKind) -> Layout {
    let layer = |base: usize| match kind {
        NetworkKind::Gcn => LayerIds::Gcn {
            weight: ParamId(base),
            bias: ParamId(base + 1),
        },
        NetworkKind::Gat => LayerIds::Gat {
            weight: ParamId(base),
            att_src: ParamId(base + 1),
            att_dst: ParamId(base + 2),
            bias: ParamId(base + 3),
        },
    };
    let per_layer = match kind {
        NetworkKind::Gcn => 2,
        NetworkKind::Gat => 4,
    };
    Layout {
        layers: [layer(0), layer(per_layer)],
        readout_weight: ParamId(2 * per_layer),
        readout_bias: ParamId(2 * per_layer + 1),
    }
}

impl<T: Scalar> QNetwork<T> {
    /// Xavier-uniform weights and attention vectors, zero biases.
    pub fn new<R: Rng + ?Sized>(kind: NetworkKind, rng: &mut R) -> Self {
        let mut params = ParamSet::new();
        for (name, r, c, is_weight) in param_spec(kind) {
            let value = if is_weight {
                xavier_init(r, c, rng)
            } else {
                Matrix::zeros(r, c)
            };
            params.add(name, value).expect("names are unique");
        }
        Self::assemble(kind, params)
    }

    pub fn zeros(kind: NetworkKind) -> Self {
        let mut params = ParamSet::new();
        for (name, r, c, _) in param_spec(kind) {
            params
                .add(name, Matrix::zeros(r, c))
                .expect("names are unique");
        }
        Self::assemble(kind, params)
    }

    /// Rebuilds a network from stored parameters, checking names and shapes.
    pub fn from_params(kind: NetworkKind, params: ParamSet<T>) -> Result<Self, String> {
        let spec = param_spec(kind);
        if spec.len() != params.len() {
            return Err(format!(
                "{kind} network has {} parameters, found {}",
                spec.len(),
                params.len()
            ));
        }
        for ((name, r, c, _), p) in spec.iter().zip(params.iter()) {
            if &p.name != name || p.value.shape() != (*r, *c) {
                return Err(format!(
                    "expected {name} {r}x{c}, found {} {}x{}",
                    p.name,
                    p.value.rows(),
                    p.value.cols()
                ));
            }
        }
        Ok(Self::assemble(kind, params))
    }

    fn assemble(kind: NetworkKind, params: ParamSet<T>) -> Self {
        Self {
            kind,
            params,
            layout: layout_for(kind),
            pending: None,
        }
    }

    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    pub fn params(&self) -> &ParamSet<T> {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamSet<T> {
        &mut self.params
    }

    /// Hard copy of parameter values from another network of the same kind.
    pub fn copy_params_from(&mut self, other: &Self) {
        assert_eq!(self.kind, other.kind, "network kinds differ");
        self.params
            .copy_values_from(&other.params)
            .expect("same kind implies same layout");
    }

    pub fn forward(&self, graph: &Graph<T>) -> Result<ActionValues<T>, GnnError> {
        self.forward_with_params(&self.params, graph)
    }

    /// Forward pass using an external parameter set laid out like this
    /// network's own (used by finite-difference probing).
    pub fn forward_with_params(
        &self,
        params: &ParamSet<T>,
        graph: &Graph<T>,
    ) -> Result<ActionValues<T>, GnnError> {
        self.trace_with(params, graph).map(|t| t.values)
    }

    pub fn forward_trace(&self, graph: &Graph<T>) -> Result<ForwardTrace<T>, GnnError> {
        self.trace_with(&self.params, graph)
    }

    /// Forward pass that keeps intermediates for a following [`backward`](Self::backward).
    pub fn forward_train(&mut self, graph: &Graph<T>) -> Result<ActionValues<T>, GnnError> {
        let trace = self.forward_trace(graph)?;
        let values = trace.values;
        self.pending = Some(trace);
        Ok(values)
    }

    /// Accumulates `∂(upstream · Q)/∂θ` into the parameter gradients, using the
    /// trace left by the last [`forward_train`](Self::forward_train).
    pub fn backward(&mut self, upstream: &ActionValues<T>) -> Result<(), GnnError> {
        let trace = self.pending.take().ok_or(GnnError::NoForwardTrace)?;
        self.backward_trace(&trace, upstream)
    }

    fn trace_with(
        &self,
        params: &ParamSet<T>,
        graph: &Graph<T>,
    ) -> Result<ForwardTrace<T>, GnnError> {
        let features = graph.features();
        if features.cols() != FEATURE_WIDTH {
            return Err(GnnError::FeatureWidth {
                expected: FEATURE_WIDTH,
                got: features.cols(),
            });
        }
        let mut hidden = features.clone();
        let mut caches = Vec::with_capacity(2);
        for (ids, act) in self.layout.layers.iter().zip(ACTIVATIONS) {
            let (out, cache) = match *ids {
                LayerIds::Gcn { weight, bias } => {
                    let layer = GcnLayer::new(params.value(weight), params.value(bias));
                    let (o, c) = layer.forward_cached(graph, &hidden, act)?;
                    (o, LayerCache::Gcn(c))
                }
                LayerIds::Gat {
                    weight,
                    att_src,
                    att_dst,
                    bias,
                } => {
                    let layer = GatLayer::new(
                        params.value(weight),
                        params.value(att_src),
                        params.value(att_dst),
                        params.value(bias),
                    );
                    let (o, c) = layer.forward_cached(graph, &hidden, act)?;
                    (o, LayerCache::Gat(c))
                }
            };
            hidden = out;
            caches.push(cache);
        }
        let pooled = hidden.col_means();
        let mut q = pooled.matmul(params.value(self.layout.readout_weight))?;
        q.add_assign(params.value(self.layout.readout_bias))?;
        let mut values = [T::zero(); NUM_ACTIONS];
        values.copy_from_slice(q.as_slice());
        let caches: [LayerCache<T>; 2] = caches.try_into().expect("two layers");
        Ok(ForwardTrace {
            graph: graph.clone(),
            caches,
            pooled,
            values,
        })
    }

    pub fn backward_trace(
        &mut self,
        trace: &ForwardTrace<T>,
        upstream: &ActionValues<T>,
    ) -> Result<(), GnnError> {
        let up = Matrix::row_vector(upstream);
        let params = &mut self.params;
        let layout = self.layout;

        let d_wr = trace.pooled.t_matmul(&up)?;
        params.grad_mut(layout.readout_weight).add_assign(&d_wr)?;
        params.grad_mut(layout.readout_bias).add_assign(&up)?;
        let d_pooled = up.matmul_t(params.value(layout.readout_weight))?;

        let n = trace.graph.node_count();
        let inv_n = T::one() / T::of(n as f64);
        let mut d_hidden = Matrix::zeros(n, HIDDEN_WIDTH);
        for i in 0..n {
            for (d, &g) in d_hidden.row_mut(i).iter_mut().zip(d_pooled.as_slice()) {
                *d = g * inv_n;
            }
        }

        for (ids, cache) in layout.layers.iter().zip(&trace.caches).rev() {
            d_hidden =
                match (*ids, cache) {
                    (LayerIds::Gcn { weight, bias }, LayerCache::Gcn(c)) => {
                        let grads = GcnLayer::new(params.value(weight), params.value(bias))
                            .backward(&trace.graph, c, &d_hidden)?;
                        params.grad_mut(weight).add_assign(&grads.weight)?;
                        params.grad_mut(bias).add_assign(&grads.bias)?;
                        grads.input
                    }
                    (
                        LayerIds::Gat {
                            weight,
                            att_src,
                            att_dst,
                            bias,
                        },
                        LayerCache::Gat(c),
                    ) => {
                        let grads = GatLayer::new(
                            params.value(weight),
                            params.value(att_src),
                            params.value(att_dst),
                            params.value(bias),
                        )
                        .backward(c, &d_hidden)?;
                        params.grad_mut(weight).add_assign(&grads.weight)?;
                        params.grad_mut(att_src).add_assign(&grads.att_src)?;
                        params.grad_mut(att_dst).add_assign(&grads.att_dst)?;
                        params.grad_mut(bias).add_assign(&grads.bias)?;
                        grads.input
                    }
                    _ => unreachable!("trace produced by a network of the same kind"),
                };
        }
        Ok(())
    }
}
