use rand::Rng;

use super::Matrix;
use crate::scalar::Scalar;

/// Xavier-uniform initialization: entries drawn from `±√(6/(rows+cols))`.
pub fn xavier_init<T: Scalar, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix<T> {
    assert!(rows >= 1 && cols >= 1, "xavier_init needs non-empty shape");
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    let data = (0..rows * cols)
        .map(|_| T::of(rng.gen_range(-limit..=limit)))
        .collect();
    Matrix::from_vec(rows, cols, data).expect("sampled values are finite")
}
