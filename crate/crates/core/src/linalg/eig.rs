//! Cyclic Jacobi routines for Hermitian eigenproblems and nullspaces.
//!
//! Both solvers use the same complex plane rotation. For a pivot entry
//! `g = |g| e^{i phi}` the rotation is `J = D P`, where `D` removes the phase of
//! `g` and `P` is the classical real Jacobi rotation of the resulting real
//! symmetric 2x2 problem.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `A = V diag(values) V*` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns.
    pub vectors: CMatrix,
}

impl HermEig {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    /// Rebuilds `V diag(values) V*`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        CMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * self.values[k] * v[(j, k)].conj())
                .sum()
        })
    }
}

#[derive(Clone, Copy)]
struct Rotation {
    c: f64,
    s: f64,
    /// `e^{-i phi}`
    phase: Complex64,
}

impl Rotation {
    /// Rotation annihilating the off-diagonal entry `g` of the Hermitian 2x2
    /// block `[[alpha, g], [conj g, beta]]`.
    fn annihilating(alpha: f64, beta: f64, g: Complex64) -> Self {
        let r = g.norm();
        let phase = (g / r).conj();
        let theta = (beta - alpha) / (2.0 * r);
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (t * t + 1.0).sqrt();
        Rotation { c, s: t * c, phase }
    }

    /// `M <- M J` restricted to columns `p` and `q`.
    fn apply_right(&self, m: &mut CMatrix, p: usize, q: usize) {
        let (c, s, ph) = (self.c, self.s, self.phase);
        for k in 0..m.rows() {
            let mp = m[(k, p)];
            let mq = m[(k, q)];
            m[(k, p)] = mp * c - mq * ph * s;
            m[(k, q)] = mp * s + mq * ph * c;
        }
    }

    /// `M <- J* M` restricted to rows `p` and `q`.
    fn apply_left_adjoint(&self, m: &mut CMatrix, p: usize, q: usize) {
        let (c, s, ph) = (self.c, self.s, self.phase.conj());
        for k in 0..m.cols() {
            let mp = m[(p, k)];
            let mq = m[(q, k)];
            m[(p, k)] = mp * c - mq * ph * s;
            m[(q, k)] = mp * s + mq * ph * c;
        }
    }
}

/// Scale used by every tolerance in this crate: `max(1, ||A||_max)`.
pub fn tol_scale(a: &CMatrix) -> f64 {
    a.max_abs().max(1.0)
}

/// Full spectral decomposition of a Hermitian matrix by cyclic Jacobi.
pub fn hermitian_eig(a: &CMatrix, tol: f64) -> Result<HermEig> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let deviation = a.hermitian_deviation();
    if deviation > tol * tol_scale(a) {
        return Err(Error::NotHermitian { deviation });
    }
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| m[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = m[(p, q)];
                if g.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let rot = Rotation::annihilating(m[(p, p)].re, m[(q, q)].re, g);
                rot.apply_right(&mut m, p, q);
                rot.apply_left_adjoint(&mut m, p, q);
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)].im = 0.0;
                m[(q, q)].im = 0.0;
                rot.apply_right(&mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermEig { values, vectors })
}

/// True iff the smallest eigenvalue is at least `-tol * max(1, ||A||_max)`.
pub fn is_psd(a: &CMatrix, tol: f64) -> Result<bool> {
    Ok(min_eigenvalue(a, tol)? >= -tol * tol_scale(a))
}

pub fn min_eigenvalue(a: &CMatrix, tol: f64) -> Result<f64> {
    Ok(hermitian_eig(a, tol)?.min())
}

/// True iff `A` is self-adjoint and idempotent within `tol`.
pub fn is_projection(a: &CMatrix, tol: f64) -> bool {
    if !a.is_square() {
        return false;
    }
    a.hermitian_deviation() <= tol && (&(a * a) - a).max_abs() <= tol
}

/// Singular values and right singular vectors from one-sided Jacobi.
#[derive(Debug, Clone)]
pub struct RightSvd {
    /// Unsorted singular values, one per column.
    pub singular_values: Vec<f64>,
    /// Right singular vectors as columns, aligned with `singular_values`.
    pub vectors: CMatrix,
}

/// One-sided (Hestenes) Jacobi: orthogonalizes the columns of `a`.
///
/// Small singular values come out with absolute accuracy near machine
/// precision, which the nullspace thresholds rely on.
pub fn right_svd(a: &CMatrix) -> RightSvd {
    let c = a.cols();
    let mut w = a.clone();
    let mut v = CMatrix::identity(c);
    let col_norm_sqr = |w: &CMatrix, j: usize| (0..w.rows()).map(|k| w[(k, j)].norm_sqr()).sum::<f64>();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..c {
            for q in (p + 1)..c {
                let alpha = col_norm_sqr(&w, p);
                let beta = col_norm_sqr(&w, q);
                let g: Complex64 = (0..w.rows()).map(|k| w[(k, p)].conj() * w[(k, q)]).sum();
                if g.norm() <= 1e-14 * (alpha * beta).sqrt() || g.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let rot = Rotation::annihilating(alpha, beta, g);
                rot.apply_right(&mut w, p, q);
                rot.apply_right(&mut v, p, q);
            }
        }
        if !rotated {
            break;
        }
    }
    let singular_values = (0..c).map(|j| col_norm_sqr(&w, j).sqrt()).collect();
    RightSvd {
        singular_values,
        vectors: v,
    }
}

/// Orthonormal basis of `{z : A z = 0}`, thresholding singular values at
/// `tol * max(1, ||A||_max)`.
pub fn nullspace(a: &CMatrix, tol: f64) -> Vec<Vec<Complex64>> {
    let cutoff = tol * tol_scale(a);
    let svd = right_svd(a);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cutoff)
        .map(|(j, _)| svd.vectors.column(j))
        .collect()
}
