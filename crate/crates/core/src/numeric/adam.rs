use super::{Matrix, NumericError, ParamSet};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First/second moment accumulators, one pair per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    pub m: Vec<Matrix<T>>,
    pub v: Vec<Matrix<T>>,
    pub t: u64,
}

impl<T: Scalar> AdamState<T> {
    pub fn for_params(params: &ParamSet<T>) -> Self {
        let zeros = || {
            params
                .iter()
                .map(|p| Matrix::zeros(p.value.rows(), p.value.cols()))
                .collect::<Vec<_>>()
        };
        Self {
            m: zeros(),
            v: zeros(),
            t: 0,
        }
    }

    fn matches(&self, params: &ParamSet<T>) -> bool {
        self.m.len() == params.len()
            && self.v.len() == params.len()
            && params
                .iter()
                .zip(self.m.iter().zip(&self.v))
                .all(|(p, (m, v))| m.shape() == p.value.shape() && v.shape() == p.value.shape())
    }
}

/// One bias-corrected Adam update applied in place. Gradients are read,
/// never cleared.
pub fn adam_step<T: Scalar>(
    params: &mut ParamSet<T>,
    state: &mut AdamState<T>,
    cfg: &AdamConfig,
) -> Result<(), NumericError> {
    if !state.matches(params) {
        return Err(NumericError::Config(
            "Adam state shapes do not match the parameter set".into(),
        ));
    }
    state.t += 1;
    let b1 = T::of(cfg.beta1);
    let b2 = T::of(cfg.beta2);
    let lr = T::of(cfg.lr);
    let eps = T::of(cfg.eps);
    let one = T::one();
    let t = T::of(state.t as f64);
    let c1 = one - b1.powf(t);
    let c2 = one - b2.powf(t);

    for ((p, m), v) in params.iter_mut().zip(&mut state.m).zip(&mut state.v) {
        let values = p.value.as_mut_slice();
        let grads = p.grad.as_slice();
        for (((x, &g), m), v) in values
            .iter_mut()
            .zip(grads)
            .zip(m.as_mut_slice())
            .zip(v.as_mut_slice())
        {
            *m = b1 * *m + (one - b1) * g;
            *v = b2 * *v + (one - b2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *x -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}
