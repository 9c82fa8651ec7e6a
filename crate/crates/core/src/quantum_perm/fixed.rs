use super::QuantumPermutation;
use crate::cpmaps::{kraus_from_choi, phi_from_density, product_closure_residual, schur_closure_residual};
use crate::densities::Density;
use crate::error::Result;
use crate::linalg::{joint_commutant, kron, linear_nullspace, CMatrix, Subspace};
use crate::report::{Check, CheckList};

/// Products this close to the cut (within a factor of 100 either way) are
/// reported as warnings.
const NEAR_FACTOR: f64 = 100.0;

/// Partition of `[n] x [n]` induced by `(i,j) ~ (k,l)` whenever
/// `E_{i,k} E_{j,l} != 0`, with the indicator matrix of each class.
#[derive(Debug, Clone)]
pub struct PatternBasis {
    pub n: usize,
    pub classes: Vec<Vec<(usize, usize)>>,
    pub basis: Vec<CMatrix>,
    pub warnings: Vec<String>,
}

impl PatternBasis {
    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    /// Class label of every entry, as an `n x n` table.
    pub fn labels(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![0; self.n]; self.n];
        for (c, class) in self.classes.iter().enumerate() {
            for &(i, j) in class {
                out[i][j] = c;
            }
        }
        out
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

impl QuantumPermutation {
    pub fn fixed_pattern_basis(&self, tol: f64) -> PatternBasis {
        let n = self.n();
        let sys = self.system();
        let norm = |i: usize, k: usize, j: usize, l: usize| {
            (0..sys.blocks().len())
                .map(|b| (sys.block_entry(b, i, k) * sys.block_entry(b, j, l)).max_abs())
                .fold(0.0, f64::max)
        };
        let mut uf = UnionFind((0..n * n).collect());
        let mut warnings = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        // symmetrized: E_ik E_jl and E_jl E_ik
                        let v = norm(i, k, j, l).max(norm(j, l, i, k));
                        if v > tol / NEAR_FACTOR && v <= tol * NEAR_FACTOR {
                            warnings.push(format!("|E({i},{k}) E({j},{l})| = {v:.3e} is near the cut {tol:.1e}"));
                        }
                        if v > tol {
                            uf.union(i * n + j, k * n + l);
                        }
                    }
                }
            }
        }
        let mut root_class = vec![usize::MAX; n * n];
        let mut classes: Vec<Vec<(usize, usize)>> = Vec::new();
        for e in 0..n * n {
            let r = uf.find(e);
            if root_class[r] == usize::MAX {
                root_class[r] = classes.len();
                classes.push(Vec::new());
            }
            classes[root_class[r]].push((e / n, e % n));
        }
        let basis = classes
            .iter()
            .map(|class| {
                let mut m = CMatrix::zeros(n, n);
                for &(i, j) in class {
                    m[(i, j)] = 1.0.into();
                }
                m
            })
            .collect();
        PatternBasis { n, classes, basis, warnings }
    }

    /// `{A : (A (x) I) u = u (A (x) I)}`.
    pub fn commutation_subspace(&self, tol: f64) -> Subspace {
        let n = self.n();
        let sys = self.system();
        let us: Vec<(CMatrix, CMatrix)> = (0..sys.blocks().len())
            .map(|b| (sys.magic_block(b), CMatrix::identity(sys.blocks()[b].d())))
            .collect();
        linear_nullspace(n, n, tol, |a| {
            us.iter()
                .map(|(u, id)| {
                    let ai = kron(a, id);
                    &(&ai * u) - &(u * &ai)
                })
                .collect()
        })
    }
}

/// The four subspaces compared by [`fix_equivalence_check`].
#[derive(Debug, Clone)]
pub struct FixReport {
    pub checks: CheckList,
    /// `{A : (A (x) I) u = u (A (x) I)}`.
    pub commutation: Subspace,
    /// Eigenspace `Phi_p(A) = A`.
    pub fixed_points: Subspace,
    /// Commutant of the Kraus operators of `Phi_p` and their adjoints.
    pub kraus_commutant: Subspace,
    pub pattern: PatternBasis,
    pub pattern_span: Subspace,
}

impl FixReport {
    pub fn dims(&self) -> [usize; 4] {
        [
            self.commutation.dim(),
            self.fixed_points.dim(),
            self.kraus_commutant.dim(),
            self.pattern_span.dim(),
        ]
    }

    pub fn pass(&self) -> bool {
        self.checks.pass()
    }
}

/// Computes the commutation subspace of `u`, the fixed points of `Phi_p`
/// (as an eigenspace and as a Kraus commutant) and the span of the pattern
/// basis, and compares them. Containment and closure residuals are held to
/// `10 * tol`.
pub fn fix_equivalence_check(u: &QuantumPermutation, p: &Density, tol: f64) -> Result<FixReport> {
    let n = u.n();
    let induced = u.induced_density();
    let phi = phi_from_density(p)?;
    let commutation = u.commutation_subspace(tol);
    let fixed_points = linear_nullspace(n, n, tol, |a| vec![&phi.apply(a).expect("n x n input") - a]);
    let kraus = kraus_from_choi(&phi, tol)?;
    let kraus_commutant = joint_commutant(kraus.operators(), tol)?;
    let pattern = u.fixed_pattern_basis(tol);
    let pattern_span = Subspace::from_spanning(n, n, &pattern.basis, tol);

    let loose = 10.0 * tol;
    let mut checks = CheckList::new();
    let diff = if p.shape() == induced.shape() {
        p.max_abs_diff(&induced)
    } else {
        f64::INFINITY
    };
    checks.push(Check::within("density_matches_system", diff, tol, Some("p differs from the induced density".into())));

    let dims = [commutation.dim(), fixed_points.dim(), kraus_commutant.dim(), pattern_span.dim()];
    let spread = dims.iter().max().unwrap() - dims.iter().min().unwrap();
    checks.push(Check::within(
        "dimensions_agree",
        spread as f64,
        0.0,
        Some(format!(
            "commutation {}, fixed points {}, Kraus commutant {}, pattern {}",
            dims[0], dims[1], dims[2], dims[3]
        )),
    ));

    let spaces = [
        ("commutation", &commutation),
        ("fixed_points", &fixed_points),
        ("kraus_commutant", &kraus_commutant),
        ("pattern", &pattern_span),
    ];
    let mut worst = (0.0f64, String::new());
    for (na, a) in &spaces {
        for (nb, b) in &spaces {
            if na != nb {
                let r = a.containment_residual(b);
                if r > worst.0 {
                    worst = (r, format!("{nb} not inside {na}"));
                }
            }
        }
    }
    checks.push(Check::within("mutual_containment", worst.0, loose, Some(worst.1)));

    let schur = schur_closure_residual(&pattern.basis, tol).max(schur_closure_residual(fixed_points.basis(), tol));
    checks.push(Check::within("schur_closed", schur, loose, Some("entrywise product leaves the span".into())));
    let algebra = product_closure_residual(fixed_points.basis(), tol);
    checks.push(Check::within("product_closed", algebra, loose, Some("matrix product leaves the span".into())));
    let ident = fixed_points.residual(&CMatrix::identity(n));
    checks.push(Check::within("contains_identity", ident, loose, Some("identity is not fixed".into())));

    Ok(FixReport {
        checks,
        commutation,
        fixed_points,
        kraus_commutant,
        pattern,
        pattern_span,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Complex64;

    const TOL: f64 = 1e-9;

    /// Orbits of `(i, j) -> (sigma(i), sigma(j))`, found by direct iteration.
    fn orbit_count(sigma: &[usize]) -> usize {
        let n = sigma.len();
        let mut seen = vec![false; n * n];
        let mut count = 0;
        for start in 0..n * n {
            if seen[start] {
                continue;
            }
            count += 1;
            let (mut i, mut j) = (start / n, start % n);
            while !seen[i * n + j] {
                seen[i * n + j] = true;
                i = sigma[i];
                j = sigma[j];
            }
        }
        count
    }

    fn rank_one(theta: f64, phase: f64) -> CMatrix {
        let v = [Complex64::new(theta.cos(), 0.0), Complex64::from_polar(theta.sin(), phase)];
        CMatrix::from_fn(2, 2, |i, j| v[i] * v[j].conj())
    }

    #[test]
    fn identity_gives_singletons() {
        let u = QuantumPermutation::identity(3);
        let pb = u.fixed_pattern_basis(TOL);
        assert_eq!(pb.dim(), 9);
        assert!(pb.classes.iter().all(|c| c.len() == 1));
        let rep = fix_equivalence_check(&u, &u.induced_density(), TOL).unwrap();
        assert!(rep.pass(), "{:?}", rep.checks);
        assert_eq!(rep.dims(), [9; 4]);
    }

    #[test]
    fn classical_classes_are_orbits() {
        for sigma in [vec![1, 2, 3, 0], vec![1, 0, 3, 2, 4], vec![2, 0, 1, 4, 3]] {
            let u = QuantumPermutation::from_permutation(&sigma).unwrap();
            let pb = u.fixed_pattern_basis(TOL);
            assert_eq!(pb.dim(), orbit_count(&sigma));
            let rep = fix_equivalence_check(&u, &u.induced_density(), TOL).unwrap();
            assert!(rep.pass(), "{:?}", rep.checks);
        }
        let cycle = QuantumPermutation::from_permutation(&[1, 2, 3, 4, 0]).unwrap();
        let rep = fix_equivalence_check(&cycle, &cycle.induced_density(), TOL).unwrap();
        assert_eq!(rep.dims(), [5; 4]);
    }

    #[test]
    fn generic_block_pair() {
        let u = QuantumPermutation::block_pair(&rank_one(0.3, 0.7), &rank_one(1.2, -0.4), TOL).unwrap();
        let pb = u.fixed_pattern_basis(TOL);
        // diagonal sectors {0,1}^2 and {2,3}^2 split into diagonal and
        // off-diagonal classes; each mixed sector is a single class
        assert_eq!(pb.dim(), 6);
        assert!(pb.warnings.is_empty());
        let rep = fix_equivalence_check(&u, &u.induced_density(), TOL).unwrap();
        assert!(rep.pass(), "{:?}", rep.checks);
        let oracle = joint_commutant(
            kraus_from_choi(&phi_from_density(&u.induced_density()).unwrap(), TOL).unwrap().operators(),
            TOL,
        )
        .unwrap();
        assert_eq!(oracle.dim(), 6);
    }

    #[test]
    fn wrong_density_is_reported() {
        let u = QuantumPermutation::identity(3);
        let p = Density::from_permutation(&[1, 2, 0]).unwrap();
        let rep = fix_equivalence_check(&u, &p, TOL).unwrap();
        assert!(!rep.checks.get("density_matches_system").unwrap().pass);
        assert!(!rep.checks.get("dimensions_agree").unwrap().pass);
    }
}
