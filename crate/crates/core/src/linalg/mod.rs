//! Dense complex linear algebra used by every other module.

mod eig;
mod matrix;
mod subspace;

pub use eig::{hermitian_eig, is_projection, is_psd, min_eigenvalue, nullspace, right_svd, tol_scale, HermEig, RightSvd};
pub use matrix::{kron, CMatrix};
pub use subspace::{joint_commutant, linear_nullspace, Subspace};

#[allow(unused_imports)]
pub(crate) use matrix::{ONE, ZERO};

pub use num_complex::Complex64;

/// Default absolute tolerance, scaled by `max(1, ||A||_max)` where a matrix is involved.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Shorthand for a real complex number.
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
