//! Forward-mode differentiation and finite-difference oracles.

pub mod diff;
mod dual;

pub use diff::{fd_gradient, fd_jacobian, fd_jacobian_fn, gradient, hessian, jacobian, DiffMap};
pub use dual::{Dual, Real};

/// Default central-difference step on unit-scaled coordinates.
pub const FD_STEP: f64 = 1e-5;
