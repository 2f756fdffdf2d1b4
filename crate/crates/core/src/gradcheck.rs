//! Finite-difference verification of the hand-written Q-network backward
//! pass.

use std::sync::Arc;

use rand::Rng;

use crate::gnn::{Adjacency, GnnError, Graph, NetworkKind, QNetwork, FEATURE_WIDTH, NUM_ACTIONS};
use crate::numeric::{finite_diff_grad, max_relative_error, Matrix, RngStream};

#[derive(Debug, Clone, PartialEq)]
pub struct GradcheckOptions {
    pub nodes: usize,
    /// Probability of each undirected edge.
    pub density: f64,
    pub h: f64,
    pub tolerance: f64,
    /// Reject draws whose forward pass sits closer than this to a ReLU or
    /// LeakyReLU kink.
    pub min_kink_margin: f64,
    pub max_attempts: usize,
    /// Half-width of the uniform draw for the loss weights `c`.
    pub upstream_scale: f64,
    /// Corrupts the analytic gradient of this parameter by 1%. Only useful
    /// for checking that the check can fail.
    pub inject_fault: Option<String>,
}

impl Default for GradcheckOptions {
    fn default() -> Self {
        Self {
            nodes: 24,
            density: 0.3,
            h: 1e-5,
            tolerance: 1e-4,
            min_kink_margin: 1e-3,
            max_attempts: 256,
            upstream_scale: 1e-3,
            inject_fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamCheck {
    pub name: String,
    pub max_relative_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradcheckReport {
    pub kind: NetworkKind,
    pub seed: u64,
    pub tolerance: f64,
    pub params: Vec<ParamCheck>,
    /// Draws rejected for sitting on a kink, plus the one used.
    pub attempts: usize,
}

impl GradcheckReport {
    pub fn passed(&self) -> bool {
        self.params
            .iter()
            .all(|p| p.max_relative_error < self.tolerance)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ParamCheck> {
        self.params
            .iter()
            // NaN errors count as failures
            .filter(|p| {
                p.max_relative_error.partial_cmp(&self.tolerance) != Some(std::cmp::Ordering::Less)
            })
    }

    pub fn worst(&self) -> Option<&ParamCheck> {
        self.params
            .iter()
            .max_by(|a, b| a.max_relative_error.total_cmp(&b.max_relative_error))
    }
}

/// Random symmetric graph with self-loops and features uniform in [-1, 1].
pub fn random_graph<R: Rng + ?Sized>(nodes: usize, density: f64, rng: &mut R) -> Graph<f64> {
    let mut edges = Vec::new();
    for i in 0..nodes {
        for j in (i + 1)..nodes {
            if rng.gen_bool(density) {
                edges.push((i, j));
            }
        }
    }
    let data = (0..nodes * FEATURE_WIDTH)
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    let features = Matrix::from_vec(nodes, FEATURE_WIDTH, data).expect("sized above");
    let adjacency = Adjacency::from_edges(nodes, &edges).expect("edges in range");
    Graph::new(features, Arc::new(adjacency)).expect("row count matches")
}

/// Compares the analytic gradient of `Σ_a c_a·Q_a` (random `c`) against
/// central differences for every parameter of a freshly drawn network.
/// Biases are drawn non-zero so their gradients are exercised too.
///
/// The loss weights are kept small so that central-difference roundoff falls
/// under the 1e-8 floor of the relative-error denominator. That matters for
/// coordinates whose true gradient is exactly zero: a GAT source-attention
/// term vanishes whenever every logit in a row sits on the same side of the
/// LeakyReLU kink, because softmax ignores a shared shift.
pub fn gradcheck(
    kind: NetworkKind,
    seed: u64,
    options: &GradcheckOptions,
) -> Result<GradcheckReport, GnnError> {
    let root = RngStream::from_seed(seed).split("gradcheck");
    let mut attempt = 0;
    let (mut net, graph, upstream) = loop {
        let mut rng = root.split_index(attempt as u64);
        attempt += 1;
        let graph = random_graph(options.nodes, options.density, &mut rng);
        let mut net = QNetwork::<f64>::new(kind, &mut rng);
        for p in net.params_mut().iter_mut() {
            if p.name.ends_with("bias") {
                p.value
                    .as_mut_slice()
                    .iter_mut()
                    .for_each(|v| *v = rng.gen_range(-0.5..0.5));
            }
        }
        let mut upstream = [0.0; NUM_ACTIONS];
        let c = options.upstream_scale;
        upstream.iter_mut().for_each(|u| *u = rng.gen_range(-c..c));
        let margin = net.forward_trace(&graph)?.kink_margin();
        if margin >= options.min_kink_margin || attempt >= options.max_attempts {
            break (net, graph, upstream);
        }
    };

    net.params_mut().zero_grads();
    net.forward_train(&graph)?;
    net.backward(&upstream)?;
    if let Some(name) = &options.inject_fault {
        if let Some(id) = net.params().id(name) {
            let g = net.params_mut().grad_mut(id);
            *g = g.scale(1.01);
        }
    }

    let mut probe = net.params().clone();
    let numeric = finite_diff_grad(&mut probe, options.h, |p| {
        // a failed forward shows up as a non-finite loss coordinate
        net.forward_with_params(p, &graph)
            .map(|q| q.iter().zip(&upstream).map(|(a, b)| a * b).sum())
            .unwrap_or(f64::NAN)
    })?;
    let params = net
        .params()
        .iter()
        .zip(&numeric)
        .map(|(p, fd)| ParamCheck {
            name: p.name.clone(),
            max_relative_error: max_relative_error(&p.grad, fd),
        })
        .collect();
    Ok(GradcheckReport {
        kind,
        seed,
        tolerance: options.tolerance,
        params,
        attempts: attempt,
    })
}
