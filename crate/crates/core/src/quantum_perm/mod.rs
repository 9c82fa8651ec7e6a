//! Finite-dimensional projective systems and quantum permutations.
//!
//! An ancilla is a weighted direct sum of full matrix blocks; the trace is
//! `tau = sum_b w_b Tr_b / d_b`. Each block holds an `n x k` grid of
//! `d_b x d_b` matrices `E_{x,a}` stored at `x * k + a`.

mod fixed;
pub mod random;

pub use fixed::{fix_equivalence_check, FixReport, PatternBasis};

use crate::cpmaps::phi_from_density;
use crate::densities::{check_bijection, check_weights, Density};
use crate::error::{Error, Result};
use crate::games::Graph;
use crate::linalg::{is_projection, kron, CMatrix, Complex64, DEFAULT_TOL};
use crate::report::{Check, CheckList, Worst};

/// One full matrix block of the ancilla with its trace weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    d: usize,
    weight: f64,
    grid: Vec<CMatrix>,
}

impl Block {
    pub fn new(d: usize, weight: f64, grid: Vec<CMatrix>) -> Self {
        Self { d, weight, grid }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn grid(&self) -> &[CMatrix] {
        &self.grid
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveSystem {
    n: usize,
    k: usize,
    blocks: Vec<Block>,
}

impl ProjectiveSystem {
    pub fn new(n: usize, k: usize, blocks: Vec<Block>) -> Result<Self> {
        if n == 0 || k == 0 || blocks.is_empty() {
            return Err(Error::ShapeMismatch("projective system needs n, k >= 1 and at least one block".into()));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.grid.len() != n * k {
                return Err(Error::ShapeMismatch(format!(
                    "block {i} has {} entries, expected {}",
                    b.grid.len(),
                    n * k
                )));
            }
            if b.d == 0 || b.grid.iter().any(|e| e.shape() != (b.d, b.d)) {
                return Err(Error::ShapeMismatch(format!("block {i} entries are not {0}x{0}", b.d)));
            }
            if !b.weight.is_finite() {
                return Err(Error::BadWeights(format!("block {i} weight {}", b.weight)));
            }
        }
        let weights: Vec<f64> = blocks.iter().map(|b| b.weight).collect();
        check_weights(&weights, 1e-9)?;
        Ok(Self { n, k, blocks })
    }

    /// Single block of dimension `d` with `E_{x,a} = f(x, a)`.
    pub fn from_fn(n: usize, k: usize, d: usize, mut f: impl FnMut(usize, usize) -> CMatrix) -> Result<Self> {
        let grid = (0..n * k).map(|i| f(i / k, i % k)).collect();
        Self::new(n, k, vec![Block::new(d, 1.0, grid)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Dimension of the whole ancilla.
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.d).sum()
    }

    /// `E_{x,a}` as a block-diagonal matrix on the whole ancilla.
    pub fn entry(&self, x: usize, a: usize) -> CMatrix {
        let mut out = CMatrix::zeros(self.total_dim(), self.total_dim());
        let mut off = 0;
        for b in &self.blocks {
            out.set_block(off, off, &b.grid[x * self.k + a]);
            off += b.d;
        }
        out
    }

    fn block_entry(&self, b: usize, x: usize, a: usize) -> &CMatrix {
        &self.blocks[b].grid[x * self.k + a]
    }

    /// `tau(f(block))` where `f` returns a matrix of that block.
    fn tau(&self, mut f: impl FnMut(usize) -> Complex64) -> Complex64 {
        self.blocks
            .iter()
            .enumerate()
            .map(|(i, b)| f(i) * (b.weight / b.d as f64))
            .sum()
    }

    /// `tau(E_{x,a} E_{y,b})`.
    pub fn pairing(&self, x: usize, a: usize, y: usize, b: usize) -> Complex64 {
        self.tau(|i| {
            let (p, q) = (self.block_entry(i, x, a), self.block_entry(i, y, b));
            let d = p.rows();
            let mut t = Complex64::new(0.0, 0.0);
            for r in 0..d {
                for c in 0..d {
                    t += p[(r, c)] * q[(c, r)];
                }
            }
            t
        })
    }

    /// `u = sum |x><a| (x) E_{x,a}` for one block, `nd x kd`.
    pub fn magic_block(&self, b: usize) -> CMatrix {
        let d = self.blocks[b].d;
        let mut u = CMatrix::zeros(self.n * d, self.k * d);
        for x in 0..self.n {
            for a in 0..self.k {
                u.set_block(x * d, a * d, self.block_entry(b, x, a));
            }
        }
        u
    }

    /// All defining relations, measured per block.
    pub fn verify(&self, tol: f64) -> CheckList {
        let (n, k) = (self.n, self.k);
        let mut proj = Worst::default();
        let mut rows = Worst::default();
        let mut row_orth = Worst::default();
        let mut col_orth = Worst::default();
        let mut col_proj = Worst::default();
        let mut col_total = Worst::default();
        let mut col_sums = Worst::default();
        let mut unitary = Worst::default();

        for (bi, blk) in self.blocks.iter().enumerate() {
            let d = blk.d;
            let id = CMatrix::identity(d);
            let e = |x: usize, a: usize| &blk.grid[x * k + a];
            for x in 0..n {
                for a in 0..k {
                    let m = e(x, a);
                    let v = m.hermitian_deviation().max((&(m * m) - m).max_abs());
                    proj.observe(v, || format!("E({x},{a}) in block {bi}"));
                }
                let mut s = CMatrix::zeros(d, d);
                for a in 0..k {
                    s = &s + e(x, a);
                }
                rows.observe((&s - &id).max_abs(), || format!("row {x} in block {bi}"));
                for a in 0..k {
                    for b in (0..k).filter(|&b| b != a) {
                        let v = (e(x, a) * e(x, b)).max_abs();
                        row_orth.observe(v, || format!("E({x},{a}) E({x},{b}) in block {bi}"));
                    }
                }
            }
            let mut total = CMatrix::zeros(d, d);
            for a in 0..k {
                let mut pa = CMatrix::zeros(d, d);
                for x in 0..n {
                    pa = &pa + e(x, a);
                    for y in (0..n).filter(|&y| y != x) {
                        let v = (e(x, a) * e(y, a)).max_abs();
                        col_orth.observe(v, || format!("E({x},{a}) E({y},{a}) in block {bi}"));
                    }
                }
                let v = pa.hermitian_deviation().max((&(&pa * &pa) - &pa).max_abs());
                col_proj.observe(v, || format!("p_{a} in block {bi}"));
                if n == k {
                    col_sums.observe((&pa - &id).max_abs(), || format!("column {a} in block {bi}"));
                }
                total = &total + &pa;
            }
            let v = (&total - &id.scale_real(n as f64)).max_abs();
            col_total.observe(v, || format!("sum of p_a in block {bi}"));
            if n == k {
                let u = self.magic_block(bi);
                let idu = CMatrix::identity(n * d);
                let v = (&(&u.adjoint() * &u) - &idu)
                    .max_abs()
                    .max((&(&u * &u.adjoint()) - &idu).max_abs());
                unitary.observe(v, || format!("magic unitary of block {bi}"));
            }
        }

        let mut out = CheckList(vec![
            proj.into_check("projections", tol),
            rows.into_check("row_sums", tol),
            row_orth.into_check("row_orthogonality", tol),
            col_orth.into_check("column_orthogonality", tol),
            col_proj.into_check("column_projections", tol),
            col_total.into_check("column_projection_total", tol),
            Check::flag("inputs_at_most_outputs", n <= k, Some(format!("n = {n} > k = {k}"))),
        ]);
        if n == k {
            out.push(col_sums.into_check("column_sums", tol));
            out.push(unitary.into_check("unitary", tol));
        }
        out
    }

    pub fn is_verified(&self, tol: f64) -> bool {
        self.verify(tol).pass()
    }

    fn require_verified(&self, tol: f64) -> Result<()> {
        let report = self.verify(tol);
        let failed: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Error::UnverifiedSystem(failed.join(", ")))
        }
    }

    /// `p(a,b|x,y) = tau(E_{x,a} E_{y,b})`.
    pub fn induced_density(&self, tol: f64) -> Result<Density> {
        self.require_verified(tol)?;
        Ok(self.density_unchecked())
    }

    fn density_unchecked(&self) -> Density {
        Density::square(self.n, self.k, |a, b, x, y| self.pairing(x, a, y, b).re)
    }

    /// Swaps the index roles: `E'_{a,x} = E_{x,a}`.
    pub fn transpose(&self) -> ProjectiveSystem {
        let (n, k) = (self.n, self.k);
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let grid = (0..k * n).map(|i| b.grid[(i % n) * k + i / n].clone()).collect();
                Block::new(b.d, b.weight, grid)
            })
            .collect();
        ProjectiveSystem { n: k, k: n, blocks }
    }
}

/// A verified projective system with `n = k` whose columns also sum to the
/// identity.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumPermutation {
    sys: ProjectiveSystem,
}

impl QuantumPermutation {
    pub fn new(sys: ProjectiveSystem, tol: f64) -> Result<Self> {
        if sys.n != sys.k {
            return Err(Error::BadInput(format!(
                "quantum permutation needs n = k, got n = {}, k = {}",
                sys.n, sys.k
            )));
        }
        sys.require_verified(tol)?;
        Ok(Self { sys })
    }

    fn built(sys: ProjectiveSystem) -> Result<Self> {
        Self::new(sys, DEFAULT_TOL).map_err(|e| match e {
            Error::UnverifiedSystem(m) => Error::BadInput(format!("construction failed verification: {m}")),
            other => other,
        })
    }

    pub fn system(&self) -> &ProjectiveSystem {
        &self.sys
    }

    pub fn into_system(self) -> ProjectiveSystem {
        self.sys
    }

    pub fn n(&self) -> usize {
        self.sys.n
    }

    pub fn total_dim(&self) -> usize {
        self.sys.total_dim()
    }

    /// Classical permutation: `E_{x,a} = [a = sigma(x)]` with `d = 1`.
    pub fn from_permutation(sigma: &[usize]) -> Result<Self> {
        check_bijection(sigma)?;
        let n = sigma.len();
        let one = |on: bool| CMatrix::from_real_fn(1, 1, |_, _| if on { 1.0 } else { 0.0 });
        Self::built(ProjectiveSystem::from_fn(n, n, 1, |x, a| one(sigma[x] == a))?)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_permutation(&(0..n).collect::<Vec<_>>()).expect("identity is a bijection")
    }

    /// The `n = 1` system `E_{0,0} = I_d`.
    pub fn trivial(d: usize) -> Self {
        Self::built(ProjectiveSystem::from_fn(1, 1, d, |_, _| CMatrix::identity(d)).expect("shape"))
            .expect("identity grid verifies")
    }

    /// Ancilla direct sum with trace weights `w1`, `w2` on the two summands.
    pub fn direct_sum(u1: &Self, u2: &Self, w1: f64, w2: f64) -> Result<Self> {
        if u1.n() != u2.n() {
            return Err(Error::BadInput(format!("direct sum of sizes {} and {}", u1.n(), u2.n())));
        }
        check_weights(&[w1, w2], 1e-9)?;
        let blocks = [(u1, w1), (u2, w2)]
            .iter()
            .flat_map(|(u, w)| u.sys.blocks.iter().map(move |b| Block::new(b.d, b.weight * w, b.grid.clone())))
            .collect();
        Self::built(ProjectiveSystem::new(u1.n(), u1.n(), blocks)?)
    }

    /// `E'_{x,a} = W* E_{x,a} W` for a unitary `W` on the whole ancilla that
    /// respects the block decomposition.
    pub fn conjugate(&self, w: &CMatrix, tol: f64) -> Result<Self> {
        let dim = self.total_dim();
        if w.shape() != (dim, dim) {
            return Err(Error::BadInput(format!("conjugating unitary must be {dim}x{dim}")));
        }
        let defect = (&(&w.adjoint() * w) - &CMatrix::identity(dim)).max_abs();
        if defect > tol {
            return Err(Error::BadInput(format!("conjugating matrix is not unitary (defect {defect:.3e})")));
        }
        let mut off = 0;
        let mut blocks = Vec::with_capacity(self.sys.blocks.len());
        for b in &self.sys.blocks {
            for i in off..off + b.d {
                for j in (0..dim).filter(|j| !(off..off + b.d).contains(j)) {
                    if w[(i, j)].norm() > tol || w[(j, i)].norm() > tol {
                        return Err(Error::BadInput("conjugating unitary mixes ancilla blocks".into()));
                    }
                }
            }
            let wb = w.block(off, off, b.d, b.d);
            let wa = wb.adjoint();
            let grid = b.grid.iter().map(|e| &(&wa * e) * &wb).collect();
            blocks.push(Block::new(b.d, b.weight, grid));
            off += b.d;
        }
        Self::built(ProjectiveSystem::new(self.n(), self.n(), blocks)?)
    }

    /// The `n = 4` family `[[p, 1-p, 0, 0], [1-p, p, 0, 0], [0, 0, q, 1-q], [0, 0, 1-q, q]]`.
    pub fn block_pair(p: &CMatrix, q: &CMatrix, tol: f64) -> Result<Self> {
        if !p.is_square() || p.shape() != q.shape() {
            return Err(Error::BadInput("block_pair needs two projections of one size".into()));
        }
        if !is_projection(p, tol) || !is_projection(q, tol) {
            return Err(Error::BadInput("block_pair inputs must be projections".into()));
        }
        let d = p.rows();
        let id = CMatrix::identity(d);
        let (pc, qc) = (&id - p, &id - q);
        let zero = CMatrix::zeros(d, d);
        let sys = ProjectiveSystem::from_fn(4, 4, d, |x, a| match (x, a) {
            (0, 0) | (1, 1) => p.clone(),
            (0, 1) | (1, 0) => pc.clone(),
            (2, 2) | (3, 3) => q.clone(),
            (2, 3) | (3, 2) => qc.clone(),
            _ => zero.clone(),
        })?;
        Self::built(sys)
    }

    pub fn transpose(&self) -> Self {
        Self { sys: self.sys.transpose() }
    }

    /// Block-diagonal sum over the index sets; the two systems must share
    /// their ancilla (block sizes and weights).
    pub fn index_sum(u1: &Self, u2: &Self) -> Result<Self> {
        let same = u1.sys.blocks.len() == u2.sys.blocks.len()
            && u1
                .sys
                .blocks
                .iter()
                .zip(&u2.sys.blocks)
                .all(|(a, b)| a.d == b.d && (a.weight - b.weight).abs() <= 1e-12);
        if !same {
            return Err(Error::BadInput("index sum needs identical ancilla blocks".into()));
        }
        let (n1, n2) = (u1.n(), u2.n());
        let n = n1 + n2;
        let blocks = u1
            .sys
            .blocks
            .iter()
            .zip(&u2.sys.blocks)
            .map(|(b1, b2)| {
                let grid = (0..n * n)
                    .map(|i| {
                        let (x, a) = (i / n, i % n);
                        if x < n1 && a < n1 {
                            b1.grid[x * n1 + a].clone()
                        } else if x >= n1 && a >= n1 {
                            b2.grid[(x - n1) * n2 + (a - n1)].clone()
                        } else {
                            CMatrix::zeros(b1.d, b1.d)
                        }
                    })
                    .collect();
                Block::new(b1.d, b1.weight, grid)
            })
            .collect();
        Self::built(ProjectiveSystem::new(n, n, blocks)?)
    }

    /// `E_{(x1,x2),(a1,a2)} = E1_{x1,a1} (x) E2_{x2,a2}` with index `x1 * n2 + x2`.
    pub fn tensor(u1: &Self, u2: &Self) -> Result<Self> {
        let (n1, n2) = (u1.n(), u2.n());
        let n = n1 * n2;
        let mut blocks = Vec::new();
        for b1 in &u1.sys.blocks {
            for b2 in &u2.sys.blocks {
                let grid = (0..n * n)
                    .map(|i| {
                        let (x, a) = (i / n, i % n);
                        let (x1, x2, a1, a2) = (x / n2, x % n2, a / n2, a % n2);
                        kron(&b1.grid[x1 * n1 + a1], &b2.grid[x2 * n2 + a2])
                    })
                    .collect();
                blocks.push(Block::new(b1.d * b2.d, b1.weight * b2.weight, grid));
            }
        }
        Self::built(ProjectiveSystem::new(n, n, blocks)?)
    }

    pub fn induced_density(&self) -> Density {
        self.sys.density_unchecked()
    }

    /// `(id (x) tau)(u* (X (x) I) u)`, evaluated block by block.
    pub fn factorizable_apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let n = self.n();
        if x.shape() != (n, n) {
            return Err(Error::ShapeMismatch(format!(
                "expected a {n}x{n} matrix, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        let mut out = CMatrix::zeros(n, n);
        for (bi, blk) in self.sys.blocks.iter().enumerate() {
            let d = blk.d;
            let u = self.sys.magic_block(bi);
            let m = &(&u.adjoint() * &kron(x, &CMatrix::identity(d))) * &u;
            let scale = blk.weight / d as f64;
            for a in 0..n {
                for b in 0..n {
                    let t: Complex64 = (0..d).map(|i| m[(a * d + i, b * d + i)]).sum();
                    out[(a, b)] += t * scale;
                }
            }
        }
        Ok(out)
    }

    /// `(A_G (x) I) u = u (A_H (x) I)` together with the induced-map
    /// identities `Phi(A_G) = A_H` and `Phi*(A_H) = A_G`.
    pub fn intertwining_report(&self, g: &Graph, h: &Graph, tol: f64) -> Result<CheckList> {
        let n = self.n();
        if g.n() != n || h.n() != n {
            return Err(Error::ShapeMismatch(format!(
                "graphs on {} and {} vertices for a quantum permutation of size {n}",
                g.n(),
                h.n()
            )));
        }
        let (ag, ah) = (g.adjacency_matrix(), h.adjacency_matrix());
        let mut w = Worst::default();
        for (bi, blk) in self.sys.blocks.iter().enumerate() {
            let id = CMatrix::identity(blk.d);
            let u = self.sys.magic_block(bi);
            let v = (&(&kron(&ag, &id) * &u) - &(&u * &kron(&ah, &id))).max_abs();
            w.observe(v, || format!("block {bi}"));
        }
        let phi = phi_from_density(&self.induced_density())?;
        let forward = (&self.factorizable_apply(&ag)? - &ah).max_abs();
        let backward = (&phi.adjoint().apply(&ah)? - &ag).max_abs();
        Ok(CheckList(vec![
            w.into_check("intertwining", tol),
            Check::within("maps_adjacency", forward, tol, Some("Phi(A_G) != A_H".into())),
            Check::within("adjoint_maps_adjacency", backward, tol, Some("Phi*(A_H) != A_G".into())),
        ]))
    }

    /// Whether `u` intertwines the adjacency matrices. A positive answer
    /// whose induced map fails to carry `A_G` to `A_H` is an internal error.
    pub fn intertwines(&self, g: &Graph, h: &Graph, tol: f64) -> Result<bool> {
        let report = self.intertwining_report(g, h, tol)?;
        let holds = report.0[0].pass;
        if holds && !report.pass() {
            return Err(Error::InternalMismatch(
                "intertwining holds but the induced map does not exchange the adjacency matrices".into(),
            ));
        }
        Ok(holds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpmaps::phi_from_density;

    const TOL: f64 = 1e-9;

    fn rank_one(theta: f64) -> CMatrix {
        let (c, s) = (theta.cos(), theta.sin());
        CMatrix::from_real_rows(&[&[c * c, c * s], &[c * s, s * s]])
    }

    #[test]
    fn classical_permutation_verifies_and_induces_permutation_density() {
        let sigma = [2, 0, 1, 3];
        let u = QuantumPermutation::from_permutation(&sigma).unwrap();
        assert!(u.system().verify(TOL).pass());
        assert_eq!(u.induced_density(), Density::from_permutation(&sigma).unwrap());
    }

    #[test]
    fn block_pair_example() {
        let p = rank_one(std::f64::consts::FRAC_PI_4);
        let q = CMatrix::diag_real(&[1.0, 0.0]);
        let u = QuantumPermutation::block_pair(&p, &q, TOL).unwrap();
        assert_eq!(u.n(), 4);
        let d = u.induced_density();
        assert!((d.p(1, 1, 1, 1) - 0.5).abs() < 1e-15);
        assert!(d.is_bisynchronous_density(TOL).unwrap());
    }

    #[test]
    fn replacing_an_entry_breaks_projection_check() {
        let u = QuantumPermutation::from_permutation(&[1, 0]).unwrap();
        let mut blocks = u.system().blocks().to_vec();
        blocks[0].grid[0] = CMatrix::from_real_fn(1, 1, |_, _| 0.5);
        let sys = ProjectiveSystem::new(2, 2, blocks).unwrap();
        let report = sys.verify(TOL);
        assert!(!report.get("projections").unwrap().pass);
        assert!(matches!(sys.induced_density(TOL), Err(Error::UnverifiedSystem(_))));
    }

    #[test]
    fn direct_sum_is_classical_mixture() {
        let s = [1, 2, 0];
        let t = [0, 2, 1];
        let u = QuantumPermutation::direct_sum(
            &QuantumPermutation::from_permutation(&s).unwrap(),
            &QuantumPermutation::from_permutation(&t).unwrap(),
            0.5,
            0.5,
        )
        .unwrap();
        assert_eq!(u.total_dim(), 2);
        assert_eq!(u.system().entry(0, 1), CMatrix::diag_real(&[1.0, 0.0]));
        let want = crate::densities::mixture(
            &[Density::from_permutation(&s).unwrap(), Density::from_permutation(&t).unwrap()],
            &[0.5, 0.5],
        )
        .unwrap();
        assert!(u.induced_density().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn rectangular_system_with_n_below_k() {
        // two inputs, three outputs, classical injection 0 -> 2, 1 -> 0
        let f = [2, 0];
        let sys = ProjectiveSystem::from_fn(2, 3, 1, |x, a| CMatrix::from_real_fn(1, 1, |_, _| if f[x] == a { 1.0 } else { 0.0 })).unwrap();
        let report = sys.verify(TOL);
        assert!(report.pass());
        assert!(report.get("column_sums").is_none());
        let d = sys.induced_density(TOL).unwrap();
        assert_eq!(d.p(2, 0, 0, 1), 1.0);
        let t = sys.transpose().verify(TOL);
        assert!(!t.get("inputs_at_most_outputs").unwrap().pass);
    }

    #[test]
    fn conjugation_preserves_density() {
        let p = rank_one(0.3);
        let q = rank_one(1.1);
        let u = QuantumPermutation::block_pair(&p, &q, TOL).unwrap();
        let (c, s) = (0.6f64, 0.8f64);
        let w = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(c, 0.0),
            (0, 1) => Complex64::new(0.0, s),
            (1, 0) => Complex64::new(0.0, s),
            _ => Complex64::new(c, 0.0),
        });
        let v = u.conjugate(&w, TOL).unwrap();
        assert!(v.induced_density().max_abs_diff(&u.induced_density()) < 1e-12);
        assert!(u.conjugate(&CMatrix::diag_real(&[1.0, 2.0]), TOL).is_err());
    }

    #[test]
    fn commuting_block_pair_is_classical() {
        let e = CMatrix::diag_real(&[1.0, 0.0]);
        let u = QuantumPermutation::block_pair(&e, &e, TOL).unwrap();
        let want = crate::densities::mixture(
            &[Density::from_permutation(&[0, 1, 2, 3]).unwrap(), Density::from_permutation(&[1, 0, 3, 2]).unwrap()],
            &[0.5, 0.5],
        )
        .unwrap();
        assert!(u.induced_density().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn factorizable_apply_matches_density_map() {
        let u = QuantumPermutation::block_pair(&rank_one(0.4), &rank_one(2.0), TOL).unwrap();
        let phi = phi_from_density(&u.induced_density()).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                let e = CMatrix::unit(4, 4, x, y);
                assert!(u.factorizable_apply(&e).unwrap().max_abs_diff(&phi.apply(&e).unwrap()) < 1e-12);
            }
        }
        let id = CMatrix::identity(4);
        assert!(u.factorizable_apply(&id).unwrap().max_abs_diff(&id) < 1e-12);
        let j = CMatrix::from_real_fn(4, 4, |_, _| 1.0);
        assert!(u.factorizable_apply(&j).unwrap().max_abs_diff(&j) < 1e-12);
    }

    #[test]
    fn transpose_induces_flip() {
        let u = QuantumPermutation::block_pair(&rank_one(0.2), &rank_one(0.9), TOL).unwrap();
        let flipped = u.induced_density().flip();
        assert!(u.transpose().induced_density().max_abs_diff(&flipped) < 1e-12);
    }

    #[test]
    fn index_sum_and_tensor() {
        let bp = QuantumPermutation::block_pair(&rank_one(0.2), &rank_one(0.9), TOL).unwrap();
        let lifted = QuantumPermutation::tensor(
            &QuantumPermutation::from_permutation(&[1, 0]).unwrap(),
            &QuantumPermutation::trivial(2),
        )
        .unwrap();
        let u = QuantumPermutation::index_sum(&bp, &lifted).unwrap();
        assert_eq!((u.n(), u.total_dim()), (6, 2));
        assert!(u.induced_density().is_bisynchronous_density(TOL).unwrap());
        assert!(QuantumPermutation::index_sum(&bp, &QuantumPermutation::identity(2)).is_err());
    }

    #[test]
    fn intertwining_cycles() {
        let c5 = Graph::cycle(5);
        assert!(QuantumPermutation::identity(5).intertwines(&c5, &c5, TOL).unwrap());
        let sigma = [3, 0, 4, 1, 2];
        let h = c5.relabel(&sigma).unwrap();
        let u = QuantumPermutation::from_permutation(&sigma).unwrap();
        let report = u.intertwining_report(&c5, &h, TOL).unwrap();
        assert!(report.pass(), "{report:?}");
        assert!(!u.intertwines(&c5, &Graph::path(5), TOL).unwrap());
    }
}
