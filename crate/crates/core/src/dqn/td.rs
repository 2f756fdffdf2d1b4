use crate::gnn::{GnnError, QNetwork, NUM_ACTIONS};
use crate::numeric::{adam_step, AdamConfig, AdamState, NumericError};

use super::replay::Transition;

/// `r` for terminal transitions, otherwise `r + γ·max_a' Q_target(s', a')`.
/// With `gamma == 0` the target network is not evaluated.
pub fn td_target(t: &Transition, target: &QNetwork<f64>, gamma: f64) -> Result<f64, GnnError> {
    if t.done || gamma == 0.0 {
        return Ok(t.reward);
    }
    let q = target.forward(&t.next_state)?;
    let max = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(t.reward + gamma * max)
}

/// Mean squared TD error over a batch, plus the signed per-sample errors
/// `td_target − Q_local(s)[a]`.
pub fn td_loss(
    batch: &[&Transition],
    local: &QNetwork<f64>,
    target: &QNetwork<f64>,
    gamma: f64,
) -> Result<(f64, Vec<f64>), GnnError> {
    assert!(!batch.is_empty(), "td_loss on an empty batch");
    let mut errors = Vec::with_capacity(batch.len());
    for t in batch {
        let y = td_target(t, target, gamma)?;
        let q = local.forward(&t.state)?;
        errors.push(y - q[t.action]);
    }
    let loss = errors.iter().map(|e| e * e).sum::<f64>() / batch.len() as f64;
    Ok((loss, errors))
}

#[derive(Debug, thiserror::Error)]
pub enum LearnError {
    #[error(transparent)]
    Network(#[from] GnnError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// One gradient step of the local network on `batch`. Returns the batch loss
/// measured before the update. The target network is only read.
pub fn learn_on_batch(
    local: &mut QNetwork<f64>,
    target: &QNetwork<f64>,
    optimizer: &mut AdamState<f64>,
    adam: &AdamConfig,
    batch: &[&Transition],
    gamma: f64,
    grad_clip: Option<f64>,
) -> Result<f64, LearnError> {
    assert!(!batch.is_empty(), "learn step on an empty batch");
    let n = batch.len() as f64;
    local.params_mut().zero_grads();
    let mut loss = 0.0;
    for t in batch {
        let y = td_target(t, target, gamma)?;
        let q = local.forward_train(&t.state)?;
        let err = q[t.action] - y;
        loss += err * err / n;
        let mut upstream = [0.0; NUM_ACTIONS];
        upstream[t.action] = 2.0 * err / n;
        local.backward(&upstream)?;
    }
    if let Some(max_norm) = grad_clip {
        let norm = local
            .params()
            .iter()
            .flat_map(|p| p.grad.as_slice())
            .map(|g| g * g)
            .sum::<f64>()
            .sqrt();
        if norm > max_norm {
            let s = max_norm / norm;
            for p in local.params_mut().iter_mut() {
                p.grad = p.grad.scale(s);
            }
        }
    }
    adam_step(local.params_mut(), optimizer, adam)?;
    local.params_mut().zero_grads();
    Ok(loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnn::{Graph, NetworkKind};
    use crate::numeric::{Matrix, RngStream};
    use std::sync::Arc;

    fn graph(v: f64) -> Arc<Graph<f64>> {
        Arc::new(Graph::fully_connected(Matrix::filled(3, 9, v)))
    }

    fn transition(reward: f64, done: bool) -> Transition {
        Transition::new(graph(0.2), 3, reward, graph(-0.4), done).unwrap()
    }

    /// Network whose 19 outputs are exactly its readout bias.
    fn constant_net(values: [f64; NUM_ACTIONS]) -> QNetwork<f64> {
        let mut net = QNetwork::zeros(NetworkKind::Gcn);
        let id = net.params().id("readout.bias").unwrap();
        *net.params_mut().value_mut(id) = Matrix::row_vector(&values);
        net
    }

    #[test]
    fn terminal_target_is_reward() {
        let target = constant_net([9.0; NUM_ACTIONS]);
        assert_eq!(
            td_target(&transition(1.0, true), &target, 0.7).unwrap(),
            1.0
        );
    }

    #[test]
    fn bootstrapped_target() {
        let mut v = [0.0; NUM_ACTIONS];
        v[11] = 2.0;
        v[2] = -5.0;
        let target = constant_net(v);
        let y = td_target(&transition(0.0, false), &target, 0.7).unwrap();
        assert!((y - 1.4).abs() < 1e-15);
    }

    #[test]
    fn myopic_target_ignores_network() {
        let target = constant_net([f64::MAX; NUM_ACTIONS]);
        assert_eq!(
            td_target(&transition(0.25, false), &target, 0.0).unwrap(),
            0.25
        );
    }

    #[test]
    fn loss_fixtures() {
        let zero = QNetwork::zeros(NetworkKind::Gcn);
        let t = transition(0.0, false);
        assert_eq!(td_loss(&[&t], &zero, &zero, 0.0).unwrap().0, 0.0);

        // target 1.4 against a local estimate of 0.4
        let mut v = [0.0; NUM_ACTIONS];
        v[0] = 2.0;
        let target = constant_net(v);
        let mut l = [0.0; NUM_ACTIONS];
        l[3] = 0.4;
        let local = constant_net(l);
        let (loss, errs) = td_loss(&[&t], &local, &target, 0.7).unwrap();
        assert!((loss - 1.0).abs() < 1e-15);
        assert!((errs[0] - 1.0).abs() < 1e-15);

        let a = transition(1.0, true);
        let b = transition(3.0, true);
        let (loss, errs) = td_loss(&[&a, &b], &zero, &zero, 0.7).unwrap();
        assert_eq!(errs, [1.0, 3.0]);
        assert_eq!(loss, 5.0);
    }

    #[test]
    fn zero_loss_leaves_parameters() {
        let mut local = QNetwork::<f64>::new(NetworkKind::Gcn, &mut RngStream::from_seed(1));
        let target = local.clone();
        let t = transition(0.0, true);
        let q = local.forward(&t.state).unwrap()[t.action];
        let t = Transition::new(
            Arc::clone(&t.state),
            t.action,
            q,
            Arc::clone(&t.next_state),
            true,
        )
        .unwrap();
        let before = local.params().clone();
        let mut opt = AdamState::for_params(local.params());
        let loss = learn_on_batch(
            &mut local,
            &target,
            &mut opt,
            &AdamConfig::default(),
            &[&t],
            0.7,
            None,
        )
        .unwrap();
        assert_eq!(loss, 0.0);
        for (a, b) in before.iter().zip(local.params().iter()) {
            assert_eq!(a.value, b.value);
        }
    }

    #[test]
    fn repeated_steps_reduce_loss_on_frozen_batch() {
        for kind in [NetworkKind::Gcn, NetworkKind::Gat] {
            let mut rng = RngStream::from_seed(8);
            let mut local = QNetwork::<f64>::new(kind, &mut rng);
            let target = local.clone();
            let a = transition(1.0, false);
            let b = Transition::new(graph(0.7), 9, -0.5, graph(0.1), true).unwrap();
            let batch = [&a, &b];
            let mut opt = AdamState::for_params(local.params());
            let adam = AdamConfig {
                lr: 1e-3,
                ..AdamConfig::default()
            };
            let first = td_loss(&batch, &local, &target, 0.7).unwrap().0;
            for _ in 0..100 {
                learn_on_batch(&mut local, &target, &mut opt, &adam, &batch, 0.7, None).unwrap();
            }
            let last = td_loss(&batch, &local, &target, 0.7).unwrap().0;
            assert!(last < first, "{kind}: {first} -> {last}");
        }
    }

    #[test]
    fn clipping_bounds_the_update() {
        let mut rng = RngStream::from_seed(2);
        let local0 = QNetwork::<f64>::new(NetworkKind::Gcn, &mut rng);
        let target = local0.clone();
        let t = transition(50.0, true);
        let run = |clip| {
            let mut local = local0.clone();
            let mut opt = AdamState::for_params(local.params());
            learn_on_batch(
                &mut local,
                &target,
                &mut opt,
                &AdamConfig::default(),
                &[&t],
                0.7,
                clip,
            )
            .unwrap();
            opt
        };
        // first moments equal (1-β1)·g, so their norm exposes the clipped gradient
        let norm = |opt: &AdamState<f64>| {
            opt.m
                .iter()
                .flat_map(|m| m.as_slice())
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt()
                / 0.1
        };
        assert!(norm(&run(None)) > 1.0);
        assert!((norm(&run(Some(1.0))) - 1.0).abs() < 1e-9);
    }
}
