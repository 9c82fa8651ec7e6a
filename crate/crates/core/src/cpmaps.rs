//! Linear maps `M_n -> M_k` held through their Choi matrix
//! `C = sum_{x,y} E_{x,y} (x) Phi(E_{x,y})`, input factor first, so that
//! `C[(x,a),(y,b)] = Phi(E_{x,y})[a,b]`.

use crate::densities::{Density, PermutationMixture};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, joint_commutant, linear_nullspace, tol_scale, CMatrix, Complex64, Subspace, DEFAULT_TOL};
use crate::report::{Check, CheckList, Worst};

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMap {
    n: usize,
    k: usize,
    choi: CMatrix,
}

impl ChoiMap {
    pub fn from_choi(n: usize, k: usize, choi: CMatrix) -> Result<Self> {
        if n == 0 || k == 0 || choi.shape() != (n * k, n * k) {
            return Err(Error::ShapeMismatch(format!(
                "Choi matrix of a map M_{n} -> M_{k} must be {0}x{0}, got {1}x{2}",
                n * k,
                choi.rows(),
                choi.cols()
            )));
        }
        Ok(Self { n, k, choi })
    }

    /// Map determined by its values `images(x, y) = Phi(E_{x,y})` (each `k x k`).
    pub fn from_images(n: usize, k: usize, mut images: impl FnMut(usize, usize) -> CMatrix) -> Result<Self> {
        let mut choi = CMatrix::zeros(n * k, n * k);
        for x in 0..n {
            for y in 0..n {
                let img = images(x, y);
                if img.shape() != (k, k) {
                    return Err(Error::ShapeMismatch(format!(
                        "image of E_({x},{y}) is {}x{}, expected {k}x{k}",
                        img.rows(),
                        img.cols()
                    )));
                }
                choi.set_block(x * k, y * k, &img);
            }
        }
        Ok(Self { n, k, choi })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_images(n, n, |x, y| CMatrix::unit(n, n, x, y)).expect("unit images are n x n")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    /// `Phi(E_{x,y})`.
    pub fn image_of_unit(&self, x: usize, y: usize) -> CMatrix {
        self.choi.block(x * self.k, y * self.k, self.k, self.k)
    }

    /// `Phi(X) = sum_{x,y} X[x,y] Phi(E_{x,y})`.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.shape() != (self.n, self.n) {
            return Err(Error::ShapeMismatch(format!(
                "map acts on {0}x{0} matrices, got {1}x{2}",
                self.n,
                x.rows(),
                x.cols()
            )));
        }
        let k = self.k;
        let mut out = CMatrix::zeros(k, k);
        for i in 0..self.n {
            for j in 0..self.n {
                let s = x[(i, j)];
                if s == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for a in 0..k {
                    for b in 0..k {
                        out[(a, b)] += s * self.choi[(i * k + a, j * k + b)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Smallest eigenvalue of the Hermitian part of the Choi matrix.
    pub fn min_choi_eigenvalue(&self) -> f64 {
        hermitian_eig(&self.choi.hermitian_part(), f64::INFINITY)
            .expect("Hermitian part is square")
            .min()
    }

    /// Choi matrix Hermitian and positive semidefinite. The violation is the
    /// larger of the Hermitian defect and the most negative eigenvalue of the
    /// Hermitian part.
    pub fn check_cp(&self, tol: f64) -> Check {
        let scale = tol_scale(&self.choi);
        let deviation = self.choi.hermitian_deviation();
        let min = self.min_choi_eigenvalue();
        let violation = deviation.max(-min) / scale;
        let witness = if deviation >= -min {
            format!("Choi matrix not Hermitian (deviation {deviation:.3e})")
        } else {
            format!("Choi eigenvalue {min:.6e}")
        };
        Check::within("completely_positive", violation, tol, Some(witness))
    }

    /// `Tr Phi(E_{x,y}) = delta_{x,y}`.
    pub fn check_tp(&self, tol: f64) -> Check {
        let mut w = Worst::default();
        for x in 0..self.n {
            for y in 0..self.n {
                let t = self.image_of_unit(x, y).trace();
                let want = if x == y { 1.0 } else { 0.0 };
                let v = (t - want).norm();
                w.observe(v, || format!("Tr Phi(E_({x},{y})) = {:.6e}{:+.6e}i", t.re, t.im));
            }
        }
        w.into_check("trace_preserving", tol)
    }

    /// `Phi(I_n) = I_k`.
    pub fn check_unital(&self, tol: f64) -> Check {
        let img = self.apply(&CMatrix::identity(self.n)).expect("identity has the input shape");
        entrywise_check("unital", &img, &CMatrix::identity(self.k), "Phi(I)", tol)
    }

    /// `Phi(J_n) = J_k` for the all-ones matrices.
    pub fn check_preserves_j(&self, tol: f64) -> Check {
        let img = self.apply(&all_ones(self.n)).expect("J has the input shape");
        entrywise_check("preserves_J", &img, &all_ones(self.k), "Phi(J)", tol)
    }

    /// `sigma(Phi(E_{x,y})) = 1` where `sigma` sums all entries.
    pub fn check_preserves_sigma(&self, tol: f64) -> Check {
        let mut w = Worst::default();
        for x in 0..self.n {
            for y in 0..self.n {
                let img = self.image_of_unit(x, y);
                let s: Complex64 = img.as_slice().iter().sum();
                let v = (s - 1.0).norm();
                w.observe(v, || format!("sigma(Phi(E_({x},{y}))) = {:.6e}{:+.6e}i", s.re, s.im));
            }
        }
        w.into_check("preserves_sigma", tol)
    }

    /// The five channel properties in a fixed order.
    pub fn check_channel(&self, tol: f64) -> CheckList {
        CheckList(vec![
            self.check_cp(tol),
            self.check_tp(tol),
            self.check_unital(tol),
            self.check_preserves_j(tol),
            self.check_preserves_sigma(tol),
        ])
    }

    pub fn is_cp(&self, tol: f64) -> bool {
        self.check_cp(tol).pass
    }

    pub fn is_tp(&self, tol: f64) -> bool {
        self.check_tp(tol).pass
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        self.check_unital(tol).pass
    }

    pub fn preserves_j(&self, tol: f64) -> bool {
        self.check_preserves_j(tol).pass
    }

    pub fn preserves_sigma(&self, tol: f64) -> bool {
        self.check_preserves_sigma(tol).pass
    }

    /// Adjoint for the trace inner product, a map `M_k -> M_n`.
    pub fn adjoint(&self) -> ChoiMap {
        let (n, k) = (self.n, self.k);
        let choi = CMatrix::from_fn(n * k, n * k, |r, c| {
            let (a, x) = (r / n, r % n);
            let (b, y) = (c / n, c % n);
            self.choi[(x * k + a, y * k + b)].conj()
        });
        ChoiMap { n: k, k: n, choi }
    }

    /// `other o self`: first `self`, then `other`.
    pub fn then(&self, other: &ChoiMap) -> Result<ChoiMap> {
        if other.n != self.k {
            return Err(Error::ShapeMismatch(format!(
                "cannot follow a map into M_{} by a map on M_{}",
                self.k, other.n
            )));
        }
        ChoiMap::from_images(self.n, other.k, |x, y| {
            other
                .apply(&self.image_of_unit(x, y))
                .expect("intermediate shape checked")
        })
    }
}

/// `compose_maps(q, p) = q o p`.
pub fn compose_maps(q: &ChoiMap, p: &ChoiMap) -> Result<ChoiMap> {
    p.then(q)
}

fn all_ones(n: usize) -> CMatrix {
    CMatrix::from_real_fn(n, n, |_, _| 1.0)
}

fn entrywise_check(name: &str, got: &CMatrix, want: &CMatrix, label: &str, tol: f64) -> Check {
    let mut w = Worst::default();
    for i in 0..got.rows() {
        for j in 0..got.cols() {
            let v = (got[(i, j)] - want[(i, j)]).norm();
            w.observe(v, || {
                let z = got[(i, j)];
                format!("{label}[{i},{j}] = {:.6e}{:+.6e}i", z.re, z.im)
            });
        }
    }
    w.into_check(name, tol)
}

/// `Phi_p(E_{x,y}) = sum_{a,b} p(a,b|x,y) E_{a,b}`.
pub fn phi_from_density(d: &Density) -> Result<ChoiMap> {
    let (n, k) = d
        .square_shape()
        .ok_or_else(|| Error::ShapeMismatch("map of a density needs equal question and answer sets for both players".into()))?;
    let checks = d.check_valid(DEFAULT_TOL);
    if let Some(c) = checks.failures().next() {
        return Err(Error::InvalidDensity(format!("{} fails by {:.3e}", c.name, c.max_violation)));
    }
    ChoiMap::from_images(n, k, |x, y| CMatrix::from_real_fn(k, k, |a, b| d.p(a, b, x, y)))
}

/// Reads `p(a,b|x,y) = Re C[(x,a),(y,b)]` back off a Choi matrix. The
/// result is not validated.
pub fn density_from_map(m: &ChoiMap, tol: f64) -> Result<Density> {
    let im = m.choi.max_imag();
    if im > tol {
        return Err(Error::BadInput(format!("Choi matrix has imaginary entries up to {im:.3e}")));
    }
    let k = m.k;
    Ok(Density::square(m.n, k, |a, b, x, y| m.choi[(x * k + a, y * k + b)].re))
}

/// `X -> sum_j w_j U_j* X U_j` with `U_j` the permutation matrices.
pub fn mixed_permutation_map(mix: &PermutationMixture) -> ChoiMap {
    let n = mix.n();
    ChoiMap::from_images(n, n, |x, y| {
        let mut img = CMatrix::zeros(n, n);
        for (w, s) in mix.iter() {
            img[(s[x], s[y])] += w;
        }
        img
    })
    .expect("images are n x n")
}

/// Kraus operators `K_i` (each `n x k`) with `Phi(X) = sum_i K_i* X K_i`.
#[derive(Debug, Clone)]
pub struct KrausSet {
    n: usize,
    k: usize,
    operators: Vec<CMatrix>,
}

impl KrausSet {
    pub fn new(n: usize, k: usize, operators: Vec<CMatrix>) -> Result<Self> {
        if let Some(op) = operators.iter().find(|op| op.shape() != (n, k)) {
            return Err(Error::ShapeMismatch(format!(
                "Kraus operator is {}x{}, expected {n}x{k}",
                op.rows(),
                op.cols()
            )));
        }
        Ok(Self { n, k, operators })
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let mut out = CMatrix::zeros(self.k, self.k);
        for op in &self.operators {
            out = &out + &op.adjoint().matmul(&x.matmul(op)?)?;
        }
        Ok(out)
    }

    pub fn to_map(&self) -> ChoiMap {
        ChoiMap::from_images(self.n, self.k, |x, y| {
            self.apply(&CMatrix::unit(self.n, self.n, x, y)).expect("unit has input shape")
        })
        .expect("Kraus images are k x k")
    }

    /// Gram matrix of the operators under the trace inner product.
    pub fn gram(&self) -> CMatrix {
        let m = self.operators.len().max(1);
        CMatrix::from_fn(m, m, |i, j| match (self.operators.get(i), self.operators.get(j)) {
            (Some(a), Some(b)) => a.inner(b),
            _ => Complex64::new(0.0, 0.0),
        })
    }
}

/// Kraus operators from the eigenpairs of the Choi matrix whose eigenvalue
/// exceeds `tol * lambda_max`.
pub fn kraus_from_choi(m: &ChoiMap, tol: f64) -> Result<KrausSet> {
    let eig = match hermitian_eig(&m.choi, tol) {
        Ok(e) => e,
        Err(Error::NotHermitian { .. }) => return Err(Error::NotCP(m.min_choi_eigenvalue())),
        Err(e) => return Err(e),
    };
    let scale = tol_scale(&m.choi);
    if eig.min() < -tol * scale {
        return Err(Error::NotCP(eig.min()));
    }
    let cutoff = tol * eig.max().max(0.0);
    let (n, k) = (m.n, m.k);
    let operators = eig
        .values
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &l)| l > cutoff && l > 0.0)
        .map(|(i, &l)| {
            let s = l.sqrt();
            CMatrix::from_fn(n, k, |x, a| eig.vectors[(x * k + a, i)].conj() * s)
        })
        .collect();
    KrausSet::new(n, k, operators)
}

/// Fixed points of a unital channel on `M_n`. Computed as the nullspace of
/// `Phi - id` and cross-checked against the commutant of the Kraus
/// operators and their adjoints.
pub fn fixed_point_set(m: &ChoiMap, tol: f64) -> Result<Subspace> {
    if m.n != m.k {
        return Err(Error::NotUnitalChannel(format!("map M_{} -> M_{} is not an endomorphism", m.n, m.k)));
    }
    let mut failures = m.check_channel(tol);
    failures.0.retain(|c| matches!(c.name.as_str(), "completely_positive" | "trace_preserving" | "unital"));
    if let Some(c) = failures.failures().next() {
        return Err(Error::NotUnitalChannel(format!("{} fails by {:.3e}", c.name, c.max_violation)));
    }
    let n = m.n;
    let fixed = linear_nullspace(n, n, tol, |a| vec![&m.apply(a).expect("shape fixed") - a]);
    let kraus = kraus_from_choi(m, tol)?;
    let commutant = joint_commutant(kraus.operators(), tol)?;
    if fixed.dim() != commutant.dim() {
        return Err(Error::InternalMismatch(format!(
            "fixed-point space has dimension {} but the Kraus commutant has dimension {}",
            fixed.dim(),
            commutant.dim()
        )));
    }
    Ok(fixed)
}

/// Largest residual of an entrywise product of two basis elements against
/// the span of the (orthonormalized) basis.
pub fn schur_closure_residual(basis: &[CMatrix], tol: f64) -> f64 {
    let Some(first) = basis.first() else {
        return 0.0;
    };
    let (r, c) = first.shape();
    let span = Subspace::from_spanning(r, c, basis, tol);
    let b = span.basis();
    let mut worst = 0.0f64;
    for i in 0..b.len() {
        for j in i..b.len() {
            worst = worst.max(span.residual(&b[i].schur(&b[j])));
        }
    }
    worst
}

pub fn is_schur_closed(basis: &[CMatrix], tol: f64) -> bool {
    schur_closure_residual(basis, tol) <= tol
}

/// Largest residual of a product `A B` of basis elements against the span.
pub fn product_closure_residual(basis: &[CMatrix], tol: f64) -> f64 {
    let Some(first) = basis.first() else {
        return 0.0;
    };
    let (r, c) = first.shape();
    let span = Subspace::from_spanning(r, c, basis, tol);
    let b = span.basis();
    let mut worst = 0.0f64;
    for x in b {
        for y in b {
            worst = worst.max(span.residual(&(x * y)));
        }
    }
    worst
}
