use num_complex::Complex64;

use super::eig::nullspace;
use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// A linear subspace of `M_{r x c}` held as a trace-orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    rows: usize,
    cols: usize,
    basis: Vec<CMatrix>,
}

impl Subspace {
    /// Orthonormalizes a spanning family, dropping directions whose residual
    /// norm falls below `tol`.
    pub fn from_spanning(rows: usize, cols: usize, spanning: &[CMatrix], tol: f64) -> Self {
        let mut basis: Vec<CMatrix> = Vec::with_capacity(spanning.len());
        for m in spanning {
            assert_eq!(m.shape(), (rows, cols), "spanning matrix has the wrong shape");
            let mut r = m.clone();
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for b in &basis {
                    let c = b.inner(&r);
                    r = &r - &b.scale(c);
                }
            }
            let norm = r.frobenius_norm();
            if norm > tol {
                basis.push(r.scale_real(1.0 / norm));
            }
        }
        Self { rows, cols, basis }
    }

    /// Wraps a basis that is already trace-orthonormal.
    pub(crate) fn from_orthonormal(rows: usize, cols: usize, basis: Vec<CMatrix>) -> Self {
        Self { rows, cols, basis }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        let basis = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| CMatrix::unit(rows, cols, i, j)))
            .collect();
        Self { rows, cols, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn into_basis(self) -> Vec<CMatrix> {
        self.basis
    }

    /// `x` minus its orthogonal projection onto the subspace.
    pub fn residual_matrix(&self, x: &CMatrix) -> CMatrix {
        let mut r = x.clone();
        for b in &self.basis {
            let c = b.inner(&r);
            r = &r - &b.scale(c);
        }
        r
    }

    /// Least-squares residual `||x - P x||_max`.
    pub fn residual(&self, x: &CMatrix) -> f64 {
        self.residual_matrix(x).max_abs()
    }

    pub fn contains(&self, x: &CMatrix, tol: f64) -> bool {
        self.residual(x) <= tol
    }

    /// Largest residual of `other`'s basis against `self`; zero iff
    /// `other` is contained in `self`.
    pub fn containment_residual(&self, other: &Subspace) -> f64 {
        other
            .basis
            .iter()
            .map(|b| self.residual(b))
            .fold(0.0, f64::max)
    }

    /// Equal dimension and mutual containment within `tol`.
    pub fn same_as(&self, other: &Subspace, tol: f64) -> bool {
        self.dim() == other.dim()
            && self.containment_residual(other) <= tol
            && other.containment_residual(self) <= tol
    }
}

/// Solves `{A in M_{r x c} : f(A) = 0}` for a linear `f` by assembling the
/// vectorized system column by column from matrix units.
pub fn linear_nullspace<F>(rows: usize, cols: usize, tol: f64, f: F) -> Subspace
where
    F: Fn(&CMatrix) -> Vec<CMatrix>,
{
    let unknowns = rows * cols;
    let images: Vec<Vec<Complex64>> = (0..unknowns)
        .map(|u| {
            f(&CMatrix::unit(rows, cols, u / cols, u % cols))
                .into_iter()
                .flat_map(CMatrix::into_vec)
                .collect()
        })
        .collect();
    let eqs = images[0].len().max(1);
    let mut system = CMatrix::zeros(eqs, unknowns);
    for (u, img) in images.iter().enumerate() {
        for (e, v) in img.iter().enumerate() {
            system[(e, u)] = *v;
        }
    }
    let basis = nullspace(&system, tol)
        .into_iter()
        .map(|z| CMatrix::from_vec(rows, cols, z).expect("nullspace vector has unknowns entries"))
        .collect();
    Subspace::from_orthonormal(rows, cols, basis)
}

/// Orthonormal basis of `{A : AK = KA and AK* = K*A for every K}`.
pub fn joint_commutant(ks: &[CMatrix], tol: f64) -> Result<Subspace> {
    let d = match ks.first() {
        Some(k) => k.rows(),
        None => return Err(Error::ShapeMismatch("joint commutant of an empty family".into())),
    };
    if ks.iter().any(|k| k.shape() != (d, d)) {
        return Err(Error::ShapeMismatch(
            "joint commutant needs square matrices of one size".into(),
        ));
    }
    let adjoints: Vec<CMatrix> = ks.iter().map(CMatrix::adjoint).collect();
    Ok(linear_nullspace(d, d, tol, |a| {
        ks.iter()
            .chain(&adjoints)
            .map(|k| &(a * k) - &(k * a))
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift(n: usize) -> CMatrix {
        CMatrix::from_real_fn(n, n, |i, j| if i == (j + 1) % n { 1.0 } else { 0.0 })
    }

    /// Brute-force oracle: rank of the explicit `n^2 x n^2` commutation
    /// system by Gaussian elimination on exact 0/±1 data.
    fn commutant_dim_by_elimination(k: &CMatrix) -> usize {
        let n = k.rows();
        let nn = n * n;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for mat in [k.clone(), k.adjoint()] {
            for r in 0..n {
                for c in 0..n {
                    // (AK - KA)_{rc} = sum_j a_{rj} K_{jc} - sum_i K_{ri} a_{ic}
                    let mut row = vec![0.0; nn];
                    for j in 0..n {
                        row[r * n + j] += mat[(j, c)].re;
                    }
                    for i in 0..n {
                        row[i * n + c] -= mat[(r, i)].re;
                    }
                    rows.push(row);
                }
            }
        }
        let mut rank = 0;
        for col in 0..nn {
            let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col].abs() > 1e-12) else {
                continue;
            };
            rows.swap(rank, piv);
            let p = rows[rank][col];
            for r in 0..rows.len() {
                if r != rank {
                    let f = rows[r][col] / p;
                    if f != 0.0 {
                        for c in 0..nn {
                            rows[r][c] -= f * rows[rank][c];
                        }
                    }
                }
            }
            rank += 1;
        }
        nn - rank
    }

    #[test]
    fn commutant_of_identity_is_everything() {
        assert_eq!(joint_commutant(&[CMatrix::identity(2)], 1e-9).unwrap().dim(), 4);
    }

    #[test]
    fn commutant_of_distinct_diagonal_is_diagonal() {
        let s = joint_commutant(&[CMatrix::diag_real(&[1.0, 2.0])], 1e-9).unwrap();
        assert_eq!(s.dim(), 2);
        for b in s.basis() {
            assert!(b[(0, 1)].norm() < 1e-12 && b[(1, 0)].norm() < 1e-12);
        }
    }

    #[test]
    fn commutant_of_cyclic_shift_matches_elimination_oracle() {
        let s3 = shift(3);
        let expected = commutant_dim_by_elimination(&s3);
        assert_eq!(expected, 3);
        let sub = joint_commutant(std::slice::from_ref(&s3), 1e-9).unwrap();
        assert_eq!(sub.dim(), expected);
        for b in sub.basis() {
            assert!((&(b * &s3) - &(&s3 * b)).max_abs() < 1e-8);
            assert!((&(b * &s3.adjoint()) - &(&s3.adjoint() * b)).max_abs() < 1e-8);
        }
    }

    #[test]
    fn basis_is_orthonormal() {
        let sub = joint_commutant(&[shift(4)], 1e-9).unwrap();
        for (i, a) in sub.basis().iter().enumerate() {
            for (j, b) in sub.basis().iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b) - Complex64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn empty_family_is_an_error() {
        assert!(joint_commutant(&[], 1e-9).is_err());
    }

    #[test]
    fn residual_and_containment() {
        let diag = Subspace::from_spanning(
            2,
            2,
            &[CMatrix::unit(2, 2, 0, 0), CMatrix::unit(2, 2, 1, 1)],
            1e-12,
        );
        assert!(diag.contains(&CMatrix::identity(2), 1e-12));
        assert!(!diag.contains(&CMatrix::unit(2, 2, 0, 1), 1e-12));
        let full = Subspace::full(2, 2);
        assert_eq!(full.containment_residual(&diag), 0.0);
        assert!(diag.containment_residual(&full) > 0.5);
    }
}
