use std::collections::VecDeque;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::gnn::{Graph, NUM_ACTIONS};

/// One step of experience. States are shared so consecutive transitions
/// hold the same graph once.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Arc<Graph<f64>>,
    pub action: usize,
    pub reward: f64,
    pub next_state: Arc<Graph<f64>>,
    pub done: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplayError {
    #[error("cannot sample {requested} transitions from a buffer of {available}")]
    Insufficient { requested: usize, available: usize },
    #[error("action {0} out of range")]
    Action(usize),
    #[error("non-finite reward {0}")]
    Reward(f64),
}

impl Transition {
    pub fn new(
        state: Arc<Graph<f64>>,
        action: usize,
        reward: f64,
        next_state: Arc<Graph<f64>>,
        done: bool,
    ) -> Result<Self, ReplayError> {
        if action >= NUM_ACTIONS {
            return Err(ReplayError::Action(action));
        }
        if !reward.is_finite() {
            return Err(ReplayError::Reward(reward));
        }
        Ok(Self {
            state,
            action,
            reward,
            next_state,
            done,
        })
    }
}

/// Fixed-capacity FIFO of transitions.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayBuffer {
    capacity: usize,
    items: VecDeque<Transition>,
    pushed: u64,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            items: VecDeque::with_capacity(capacity.min(1 << 16)),
            pushed: 0,
        }
    }

    /// Rebuilds a buffer from saved contents (oldest first).
    pub fn from_parts(capacity: usize, items: Vec<Transition>, pushed: u64) -> Self {
        let mut b = Self::new(capacity);
        b.items.extend(items);
        while b.items.len() > capacity {
            b.items.pop_front();
        }
        b.pushed = pushed;
        b
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Total pushes ever made, evictions included.
    pub fn pushed(&self) -> u64 {
        self.pushed
    }

    pub fn get(&self, i: usize) -> Option<&Transition> {
        self.items.get(i)
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(t);
        self.pushed += 1;
    }

    /// `k` distinct positions, uniformly without replacement.
    pub fn sample_indices<R: Rng + ?Sized>(
        &self,
        k: usize,
        rng: &mut R,
    ) -> Result<Vec<usize>, ReplayError> {
        if k > self.items.len() {
            return Err(ReplayError::Insufficient {
                requested: k,
                available: self.items.len(),
            });
        }
        Ok(rand::seq::index::sample(rng, self.items.len(), k).into_vec())
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        k: usize,
        rng: &mut R,
    ) -> Result<Vec<&Transition>, ReplayError> {
        Ok(self
            .sample_indices(k, rng)?
            .into_iter()
            .map(|i| &self.items[i])
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{Matrix, RngStream};
    use proptest::prelude::*;

    fn tagged(tag: usize) -> Transition {
        let g = Arc::new(Graph::fully_connected(Matrix::filled(1, 9, tag as f64)));
        Transition::new(Arc::clone(&g), tag % NUM_ACTIONS, tag as f64, g, false).unwrap()
    }

    fn tags(b: &ReplayBuffer) -> Vec<f64> {
        b.iter().map(|t| t.reward).collect()
    }

    #[test]
    fn fifo_eviction() {
        let mut b = ReplayBuffer::new(2);
        b.push(tagged(1));
        assert_eq!(b.len(), 1);
        b.push(tagged(2));
        b.push(tagged(3));
        assert_eq!(tags(&b), [2.0, 3.0]);
        assert_eq!(b.pushed(), 3);
    }

    #[test]
    fn sampling_edges() {
        let mut rng = RngStream::from_seed(0);
        let mut b = ReplayBuffer::new(8);
        b.push(tagged(7));
        assert_eq!(b.sample(1, &mut rng).unwrap()[0].reward, 7.0);
        for i in 0..5 {
            b.push(tagged(i));
        }
        let mut idx = b.sample_indices(6, &mut rng).unwrap();
        idx.sort_unstable();
        assert_eq!(idx, [0, 1, 2, 3, 4, 5]);
        assert_eq!(
            b.sample(7, &mut rng).unwrap_err(),
            ReplayError::Insufficient {
                requested: 7,
                available: 6
            }
        );
    }

    #[test]
    fn sampling_is_uniform() {
        let mut b = ReplayBuffer::new(4);
        for i in 0..4 {
            b.push(tagged(i));
        }
        let mut rng = RngStream::from_seed(5);
        let n = 10_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[b.sample_indices(1, &mut rng).unwrap()[0]] += 1;
        }
        let p: f64 = 0.25;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 * p).abs() <= 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let mut b = ReplayBuffer::new(100);
        for i in 0..100 {
            b.push(tagged(i));
        }
        let a = b.sample_indices(10, &mut RngStream::from_seed(3)).unwrap();
        let c = b.sample_indices(10, &mut RngStream::from_seed(3)).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn rejects_bad_transitions() {
        let g = Arc::new(Graph::fully_connected(Matrix::zeros(1, 9)));
        assert!(Transition::new(Arc::clone(&g), 19, 0.0, Arc::clone(&g), false).is_err());
        assert!(Transition::new(Arc::clone(&g), 0, f64::NAN, g, false).is_err());
    }

    proptest! {
        #[test]
        fn matches_naive_model(cap in 1usize..12, pushes in proptest::collection::vec(0usize..1000, 0..60)) {
            let mut b = ReplayBuffer::new(cap);
            let mut model: Vec<usize> = Vec::new();
            for (k, &tag) in pushes.iter().enumerate() {
                b.push(tagged(tag));
                model.push(tag);
                if model.len() > cap {
                    model.remove(0);
                }
                prop_assert_eq!(b.pushed(), k as u64 + 1);
                prop_assert!(b.len() <= cap);
            }
            let expected: Vec<f64> = model.iter().map(|&t| t as f64).collect();
            prop_assert_eq!(tags(&b), expected);
        }
    }
}
