use rand::{Rng, RngCore};

use crate::env::{EnvError, Environment};
use crate::gnn::{GnnError, Graph, QNetwork, NUM_ACTIONS};
use crate::numeric::RngStream;

use super::policy::greedy_action;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub episodes: usize,
    pub mean_score_diff: f64,
    pub mean_return: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Network(#[from] GnnError),
}

/// Reset seed of evaluation episode `index`.
pub fn eval_episode_seed(seed: u64, index: usize) -> u64 {
    RngStream::from_seed(seed)
        .split("eval")
        .split_index(index as u64)
        .next_u64()
}

/// Rolls out `episodes` episodes with an arbitrary policy and averages the
/// score difference and return. Episodes run in index order.
pub fn evaluate_policy<E, P>(
    env: &mut E,
    episodes: usize,
    seed: u64,
    mut policy: P,
) -> Result<EvalResult, EvalError>
where
    E: Environment + ?Sized,
    P: FnMut(&Graph<f64>) -> Result<usize, GnnError>,
{
    assert!(episodes >= 1, "evaluate needs at least one episode");
    let mut score = 0.0;
    let mut ret = 0.0;
    for i in 0..episodes {
        let mut graph = env.reset(eval_episode_seed(seed, i))?;
        loop {
            let step = env.step(policy(&graph)?)?;
            score += f64::from(step.score_delta);
            ret += step.reward;
            if step.done {
                break;
            }
            graph = step.graph;
        }
    }
    let n = episodes as f64;
    Ok(EvalResult {
        episodes,
        mean_score_diff: score / n,
        mean_return: ret / n,
    })
}

/// Greedy (ε = 0) rollouts of `net`. No learning happens.
pub fn evaluate<E: Environment + ?Sized>(
    env: &mut E,
    net: &QNetwork<f64>,
    episodes: usize,
    seed: u64,
) -> Result<EvalResult, EvalError> {
    evaluate_policy(env, episodes, seed, |g| Ok(greedy_action(&net.forward(g)?)))
}

/// Uniformly random actions, drawn from a stream derived from `seed`.
pub fn evaluate_random<E: Environment + ?Sized>(
    env: &mut E,
    episodes: usize,
    seed: u64,
) -> Result<EvalResult, EvalError> {
    let mut rng = RngStream::from_seed(seed).split("random-policy");
    evaluate_policy(env, episodes, seed, |_| Ok(rng.gen_range(0..NUM_ACTIONS)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{ChainEnv, EnvStep, FootballEnv};
    use crate::gnn::NetworkKind;
    use crate::numeric::Matrix;
    use crate::obs::EdgeRule;
    use crate::pitch::Scenario;

    /// Action 0 scores and ends the episode; anything else ends it empty.
    struct OneShot;

    impl Environment for OneShot {
        fn reset(&mut self, _seed: u64) -> Result<Graph<f64>, EnvError> {
            Ok(Graph::fully_connected(Matrix::zeros(2, 9)))
        }

        fn step(&mut self, action: usize) -> Result<EnvStep, EnvError> {
            let win = action == 0;
            Ok(EnvStep {
                graph: Graph::fully_connected(Matrix::zeros(2, 9)),
                reward: if win { 1.0 } else { 0.0 },
                done: true,
                score_delta: i32::from(win),
            })
        }
    }

    #[test]
    fn net_preferring_action_zero_hits_the_max() {
        let mut net = QNetwork::zeros(NetworkKind::Gcn);
        let id = net.params().id("readout.bias").unwrap();
        net.params_mut().value_mut(id)[(0, 0)] = 1.0;
        let r = evaluate(&mut OneShot, &net, 10, 0).unwrap();
        assert_eq!((r.mean_return, r.mean_score_diff), (1.0, 1.0));
    }

    #[test]
    fn zero_network_baseline_is_reproducible() {
        let net = QNetwork::zeros(NetworkKind::Gcn);
        let mut env = FootballEnv::new(
            Scenario::by_name("easy").unwrap().with_episode_length(200),
            EdgeRule::Full,
        );
        let a = evaluate(&mut env, &net, 2, 4).unwrap();
        let b = evaluate(&mut env, &net, 2, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn identical_nets_identical_results() {
        let net = QNetwork::new(NetworkKind::Gat, &mut RngStream::from_seed(3));
        let twin = net.clone();
        let mut env = ChainEnv::new(30);
        assert_eq!(
            evaluate(&mut env, &net, 3, 1).unwrap(),
            evaluate(&mut env, &twin, 3, 1).unwrap()
        );
    }
}
