//! Vector strategies `h_{x,a}` in `C^m` and the bisynchronous vector
//! permutation conditions.
//!
//! The inner product `<u, v> = sum conj(u_i) v_i` is conjugate-linear in its
//! first argument.

use crate::densities::Density;
use crate::error::{Error, Result};
use crate::linalg::Complex64;
use crate::quantum_perm::ProjectiveSystem;
use crate::report::{Check, CheckList};

#[derive(Debug, Clone, PartialEq)]
pub struct VectorStrategy {
    n: usize,
    k: usize,
    m: usize,
    /// `h[x * k + a]`.
    h: Vec<Vec<Complex64>>,
}

fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn norm(u: &[Complex64]) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn distance(u: &[Complex64], v: &[Complex64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

fn add_into(acc: &mut [Complex64], v: &[Complex64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

/// Records every violation above `tol`, keeping the largest as the measure.
struct Violations {
    name: &'static str,
    max: f64,
    found: Vec<String>,
}

impl Violations {
    fn new(name: &'static str) -> Self {
        Self { name, max: 0.0, found: Vec::new() }
    }

    fn observe(&mut self, v: f64, tol: f64, label: impl FnOnce() -> String) {
        self.max = self.max.max(v);
        if v > tol {
            self.found.push(format!("{} ({v:.3e})", label()));
        }
    }

    fn into_check(self, tol: f64) -> Check {
        let witness = (!self.found.is_empty()).then(|| self.found.join("; "));
        Check::within(self.name, self.max, tol, witness)
    }
}

impl VectorStrategy {
    pub fn new(n: usize, k: usize, m: usize, h: Vec<Vec<Complex64>>) -> Result<Self> {
        if n == 0 || k == 0 || m == 0 || h.len() != n * k {
            return Err(Error::ShapeMismatch(format!("{} vectors for n = {n}, k = {k}", h.len())));
        }
        if let Some(i) = h.iter().position(|v| v.len() != m) {
            return Err(Error::ShapeMismatch(format!(
                "vector h({},{}) has length {}, expected {m}",
                i / k,
                i % k,
                h[i].len()
            )));
        }
        Ok(Self { n, k, m, h })
    }

    /// `h_{x,a} = delta_{a, sigma(x)} h` for a unit vector `h`.
    pub fn permutation_witness(sigma: &[usize], h: &[Complex64]) -> Result<Self> {
        crate::densities::check_bijection(sigma)?;
        let n = sigma.len();
        let zero = vec![Complex64::new(0.0, 0.0); h.len()];
        let vs = (0..n * n)
            .map(|i| if sigma[i / n] == i % n { h.to_vec() } else { zero.clone() })
            .collect();
        Self::new(n, n, h.len(), vs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vector(&self, x: usize, a: usize) -> &[Complex64] {
        &self.h[x * self.k + a]
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.h
    }

    pub fn vector_mut(&mut self, x: usize, a: usize) -> &mut [Complex64] {
        &mut self.h[x * self.k + a]
    }

    /// `<h_{x,a}, h_{y,b}>`.
    pub fn gram(&self, x: usize, a: usize, y: usize, b: usize) -> Complex64 {
        inner(self.vector(x, a), self.vector(y, b))
    }

    /// `sum_b h_{x,b}`.
    pub fn row_sum(&self, x: usize) -> Vec<Complex64> {
        let mut s = vec![Complex64::new(0.0, 0.0); self.m];
        for a in 0..self.k {
            add_into(&mut s, self.vector(x, a));
        }
        s
    }

    /// `k_a = sum_x h_{x,a}`.
    pub fn column_sum(&self, a: usize) -> Vec<Complex64> {
        let mut s = vec![Complex64::new(0.0, 0.0); self.m];
        for x in 0..self.n {
            add_into(&mut s, self.vector(x, a));
        }
        s
    }
}

/// Checks orthogonality within rows and within columns, that every row sum
/// and every column sum equals `h = sum_b h_{0,b}`, and that `h` and each
/// `k_a` have norm one. Every violation is listed.
pub fn verify_bisync_vect(v: &VectorStrategy, tol: f64) -> Result<CheckList> {
    let (n, k) = (v.n, v.k);
    if n != k {
        return Err(Error::ShapeMismatch(format!(
            "vector permutation conditions need n = k, got {n} and {k}"
        )));
    }
    let mut rows = Violations::new("row_orthogonality");
    let mut cols = Violations::new("column_orthogonality");
    let mut row_sums = Violations::new("row_sums");
    let mut col_sums = Violations::new("column_sums");
    let mut unit = Violations::new("unit_vector");
    let mut col_norms = Violations::new("column_sum_norms");

    for x in 0..n {
        for a in 0..k {
            for b in (a + 1)..k {
                let g = v.gram(x, a, x, b).norm();
                rows.observe(g, tol, || format!("<h({x},{a}), h({x},{b})>"));
            }
        }
    }
    for a in 0..k {
        for x in 0..n {
            for y in (x + 1)..n {
                let g = v.gram(x, a, y, a).norm();
                cols.observe(g, tol, || format!("<h({x},{a}), h({y},{a})>"));
            }
        }
    }
    let h = v.row_sum(0);
    for x in 1..n {
        let d = distance(&v.row_sum(x), &h);
        row_sums.observe(d, tol, || format!("row {x}"));
    }
    for a in 0..k {
        let ka = v.column_sum(a);
        col_sums.observe(distance(&ka, &h), tol, || format!("column {a}"));
        col_norms.observe((norm(&ka) - 1.0).abs(), tol, || format!("|k_{a}|"));
    }
    unit.observe((norm(&h) - 1.0).abs(), tol, || "|h|".to_string());

    Ok(CheckList(vec![
        rows.into_check(tol),
        cols.into_check(tol),
        row_sums.into_check(tol),
        col_sums.into_check(tol),
        unit.into_check(tol),
        col_norms.into_check(tol),
    ]))
}

/// `p(a,b|x,y) = Re <h_{x,a}, h_{y,b}>` for a verified strategy.
pub fn density_from_vectors(v: &VectorStrategy, tol: f64) -> Result<Density> {
    let report = verify_bisync_vect(v, tol)?;
    if !report.pass() {
        let failed: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
        return Err(Error::UnverifiedSystem(failed.join(", ")));
    }
    let (n, k) = (v.n, v.k);
    let mut worst_im = 0.0f64;
    let mut p = Vec::with_capacity(n * n * k * k);
    for x in 0..n {
        for y in 0..n {
            for a in 0..k {
                for b in 0..k {
                    let g = v.gram(x, a, y, b);
                    worst_im = worst_im.max(g.im.abs());
                    if g.re < -tol {
                        return Err(Error::NegativeEntry {
                            value: g.re,
                            location: format!("p({a},{b}|{x},{y})"),
                        });
                    }
                    p.push(g.re);
                }
            }
        }
    }
    if worst_im > tol {
        return Err(Error::NonRealGram(worst_im));
    }
    Density::new(n, n, k, k, p)
}

/// `h_{x,a}` is the concatenation over ancilla blocks of
/// `sqrt(w_b / d_b) vec(E_{x,a})`, so that `<h_{x,a}, h_{y,b}> = tau(E_{x,a} E_{y,b})`.
pub fn vect_from_projective(sys: &ProjectiveSystem, tol: f64) -> Result<VectorStrategy> {
    let report = sys.verify(tol);
    if !report.pass() {
        let failed: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
        return Err(Error::UnverifiedSystem(failed.join(", ")));
    }
    let (n, k) = (sys.n(), sys.k());
    let m: usize = sys.blocks().iter().map(|b| b.d() * b.d()).sum();
    let h = (0..n * k)
        .map(|i| {
            sys.blocks()
                .iter()
                .flat_map(|b| {
                    let s = (b.weight() / b.d() as f64).sqrt();
                    b.grid()[i].as_slice().iter().map(move |z| z * s)
                })
                .collect()
        })
        .collect();
    VectorStrategy::new(n, k, m, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::quantum_perm::QuantumPermutation;

    const TOL: f64 = 1e-9;

    fn unit_h() -> Vec<Complex64> {
        vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]
    }

    #[test]
    fn permutation_witness() {
        let sigma = [2, 0, 1];
        let v = VectorStrategy::permutation_witness(&sigma, &unit_h()).unwrap();
        assert!(verify_bisync_vect(&v, TOL).unwrap().pass());
        assert_eq!(density_from_vectors(&v, TOL).unwrap(), Density::from_permutation(&sigma).unwrap());
        let unnormalized = vec![Complex64::new(2.0, 0.0)];
        let v = VectorStrategy::permutation_witness(&sigma, &unnormalized).unwrap();
        let report = verify_bisync_vect(&v, TOL).unwrap();
        assert!(!report.get("unit_vector").unwrap().pass);
    }

    #[test]
    fn perturbation_names_the_pair() {
        let u = QuantumPermutation::from_permutation(&[1, 0, 2]).unwrap();
        let mut v = vect_from_projective(u.system(), TOL).unwrap();
        v.vector_mut(0, 0)[0] += 1e-3;
        let report = verify_bisync_vect(&v, TOL).unwrap();
        let rows = report.get("row_orthogonality").unwrap();
        assert!(!rows.pass);
        let w = rows.witness.as_deref().unwrap();
        assert!(w.contains("<h(0,0), h(0,1)>"), "{w}");
        assert!(matches!(density_from_vectors(&v, TOL), Err(Error::UnverifiedSystem(_))));
    }

    #[test]
    fn block_pair_embedding_matches_traces() {
        let p = CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let q = CMatrix::diag_real(&[0.0, 1.0]);
        let u = QuantumPermutation::block_pair(&p, &q, TOL).unwrap();
        let v = vect_from_projective(u.system(), TOL).unwrap();
        assert_eq!(v.m(), 4);
        assert!(verify_bisync_vect(&v, TOL).unwrap().pass());
        let d = density_from_vectors(&v, TOL).unwrap();
        assert!(d.max_abs_diff(&u.induced_density()) < 1e-12);
    }

    #[test]
    fn rectangular_strategy_is_rejected() {
        let v = VectorStrategy::new(2, 3, 1, vec![vec![Complex64::new(0.0, 0.0)]; 6]).unwrap();
        assert!(matches!(verify_bisync_vect(&v, TOL), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn global_phase_rotation_keeps_density() {
        let u = QuantumPermutation::from_permutation(&[1, 2, 0]).unwrap();
        let base = VectorStrategy::permutation_witness(&[1, 2, 0], &unit_h()).unwrap();
        let mut v = base.clone();
        for x in 0..3 {
            for a in 0..3 {
                v.vector_mut(x, a)[1] *= Complex64::new(0.0, 1.0);
            }
        }
        let d = density_from_vectors(&v, TOL).unwrap();
        assert!(d.max_abs_diff(&u.induced_density()) < 1e-15);
        for x in 0..3 {
            for y in 0..3 {
                let s: f64 = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).map(|(a, b)| d.p(a, b, x, y)).sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }
}
