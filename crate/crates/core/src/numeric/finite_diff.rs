use super::{Matrix, NumericError, ParamSet};
use crate::scalar::Scalar;

/// Central-difference gradient of `loss` with respect to every coordinate of
/// `params`. Each coordinate is restored to its exact original value after
/// probing.
pub fn finite_diff_grad<T, F>(
    params: &mut ParamSet<T>,
    h: T,
    mut loss: F,
) -> Result<Vec<Matrix<T>>, NumericError>
where
    T: Scalar,
    F: FnMut(&ParamSet<T>) -> T,
{
    assert!(h > T::zero(), "finite-difference step must be positive");
    let two_h = h + h;
    let mut out = Vec::with_capacity(params.len());
    for idx in 0..params.len() {
        let (rows, cols) = params
            .iter()
            .nth(idx)
            .map(|p| p.value.shape())
            .unwrap_or((0, 0));
        let mut grad = Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                let id = super::ParamId(idx);
                let original = params.value(id)[(r, c)];
                params.value_mut(id)[(r, c)] = original + h;
                let plus = loss(params);
                params.value_mut(id)[(r, c)] = original - h;
                let minus = loss(params);
                params.value_mut(id)[(r, c)] = original;
                if !plus.is_finite() || !minus.is_finite() {
                    return Err(NumericError::NonFiniteLoss {
                        param: params
                            .iter()
                            .nth(idx)
                            .map(|p| p.name.clone())
                            .unwrap_or_default(),
                        row: r,
                        col: c,
                    });
                }
                grad[(r, c)] = (plus - minus) / two_h;
            }
        }
        out.push(grad);
    }
    Ok(out)
}

/// `|analytic − numeric| / max(1e-8, |analytic|)`.
pub fn relative_error<T: Scalar>(analytic: T, numeric: T) -> T {
    (analytic - numeric).abs() / analytic.abs().max(T::of(1e-8))
}

/// Worst per-coordinate [`relative_error`] over two same-shaped matrices.
pub fn max_relative_error<T: Scalar>(analytic: &Matrix<T>, numeric: &Matrix<T>) -> T {
    assert_eq!(analytic.shape(), numeric.shape());
    analytic
        .as_slice()
        .iter()
        .zip(numeric.as_slice())
        .fold(T::zero(), |m, (&a, &n)| m.max(relative_error(a, n)))
}
