use rand::Rng;

use crate::gnn::NUM_ACTIONS;

/// Index of the largest value; ties go to the lowest index.
pub fn greedy_action(q: &[f64; NUM_ACTIONS]) -> usize {
    let mut best = 0;
    for (i, &v) in q.iter().enumerate().skip(1) {
        if v > q[best] {
            best = i;
        }
    }
    best
}

/// Epsilon-greedy choice. One uniform draw decides exploration; a second
/// picks the random action. At `eps == 0` no randomness is consumed.
pub fn select_action<R: Rng + ?Sized>(q: &[f64; NUM_ACTIONS], eps: f64, rng: &mut R) -> usize {
    debug_assert!((0.0..=1.0).contains(&eps));
    if eps > 0.0 && rng.gen::<f64>() < eps {
        rng.gen_range(0..NUM_ACTIONS)
    } else {
        greedy_action(q)
    }
}
