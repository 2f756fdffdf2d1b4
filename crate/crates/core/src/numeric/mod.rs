//! Dense linear algebra, parameter containers, Adam, initialization and
//! a central-difference gradient oracle.

mod adam;
mod error;
mod finite_diff;
mod init;
mod matrix;
mod params;
mod rng;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use error::NumericError;
pub use finite_diff::{finite_diff_grad, max_relative_error, relative_error};
pub use init::xavier_init;
pub use matrix::Matrix;
pub use params::{Param, ParamId, ParamSet};
pub use rng::{RngSnapshot, RngStream};
