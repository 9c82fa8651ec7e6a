//! Membership in the local (classical) polytopes by linear programming over
//! deterministic strategies.

use super::lp::phase_one;
use super::{Density, PermutationMixture};
use crate::error::{Error, Result};

/// Largest `n` accepted by [`local_bisync_membership`] (`6! = 720` columns).
pub const MAX_BISYNC_N: usize = 6;
/// Column budget for [`local_sync_membership`] (`k^n` response functions).
pub const MAX_SYNC_COLUMNS: usize = 3000;

/// Result of a local-membership query.
#[derive(Debug, Clone)]
pub enum Membership<M> {
    Member(M),
    Infeasible(SeparatingFunctional),
}

impl<M> Membership<M> {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }

    pub fn member(self) -> Option<M> {
        match self {
            Membership::Member(m) => Some(m),
            Membership::Infeasible(_) => None,
        }
    }

    pub fn witness(self) -> Option<SeparatingFunctional> {
        match self {
            Membership::Member(_) => None,
            Membership::Infeasible(w) => Some(w),
        }
    }
}

/// Linear functional `F(q) = sum coefficients * q + offset` that is at most
/// `max_on_atoms` on every deterministic strategy but positive on the input.
#[derive(Debug, Clone)]
pub struct SeparatingFunctional {
    /// Coefficients in the density's `[x][y][a][b]` layout, scaled to
    /// `max |coefficient| = 1` (offset included).
    pub coefficients: Density,
    pub offset: f64,
    /// `F` evaluated on the input density.
    pub value_on_input: f64,
    /// Largest value of `F` over the deterministic strategies considered.
    pub max_on_atoms: f64,
}

impl SeparatingFunctional {
    pub fn evaluate(&self, d: &Density) -> f64 {
        self.coefficients
            .as_slice()
            .iter()
            .zip(d.as_slice())
            .map(|(c, p)| c * p)
            .sum::<f64>()
            + self.offset
    }

    /// Separation margin `F(input) - max_atoms F`.
    pub fn violation(&self) -> f64 {
        self.value_on_input - self.max_on_atoms
    }
}

/// Convex combination of deterministic synchronous strategies `x -> f[x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicMixture {
    pub k: usize,
    pub weights: Vec<f64>,
    pub functions: Vec<Vec<usize>>,
}

impl DeterministicMixture {
    pub fn to_density(&self) -> Density {
        let n = self.functions[0].len();
        let mut d = Density::square(n, self.k, |_, _, _, _| 0.0);
        for (w, f) in self.weights.iter().zip(&self.functions) {
            for x in 0..n {
                for y in 0..n {
                    let v = d.p(f[x], f[y], x, y) + w;
                    d.set(f[x], f[y], x, y, v);
                }
            }
        }
        d
    }
}

/// Decides whether a bisynchronous density on `n` questions and `n` answers
/// is a convex combination of permutation densities.
pub fn local_bisync_membership(d: &Density, tol: f64) -> Result<Membership<PermutationMixture>> {
    let n = match d.square_shape() {
        Some((n, k)) if n == k => n,
        _ => {
            return Err(Error::PreconditionFailed(
                "local bisynchronous membership needs n questions and n answers".into(),
            ))
        }
    };
    if n > MAX_BISYNC_N {
        return Err(Error::PreconditionFailed(format!(
            "n = {n} exceeds the permutation enumeration limit {MAX_BISYNC_N}"
        )));
    }
    if !d.validate(tol) {
        return Err(Error::PreconditionFailed("input is not a valid density".into()));
    }
    if !d.is_bisynchronous_density(tol)? {
        return Err(Error::PreconditionFailed("input is not bisynchronous".into()));
    }
    let atoms = permutations(n);
    Ok(match solve(d, &atoms, n, tol)? {
        Membership::Member((weights, perms)) => Membership::Member(PermutationMixture::new(weights, perms)?),
        Membership::Infeasible(w) => Membership::Infeasible(w),
    })
}

/// Decides whether a synchronous density is a convex combination of
/// deterministic strategies `x -> f(x)`; limited to `k^n <= MAX_SYNC_COLUMNS`.
pub fn local_sync_membership(d: &Density, tol: f64) -> Result<Membership<DeterministicMixture>> {
    let (n, k) = d
        .square_shape()
        .ok_or_else(|| Error::PreconditionFailed("synchronous membership needs a square density".into()))?;
    let columns = (k as f64).powi(n as i32);
    if columns > MAX_SYNC_COLUMNS as f64 {
        return Err(Error::TooLarge(format!(
            "{k}^{n} response functions exceed the limit {MAX_SYNC_COLUMNS}"
        )));
    }
    if !d.validate(tol) {
        return Err(Error::PreconditionFailed("input is not a valid density".into()));
    }
    if !d.is_synchronous_density(tol)? {
        return Err(Error::PreconditionFailed("input is not synchronous".into()));
    }
    let atoms = functions(n, k);
    Ok(match solve(d, &atoms, k, tol)? {
        Membership::Member((weights, functions)) => Membership::Member(DeterministicMixture { k, weights, functions }),
        Membership::Infeasible(w) => Membership::Infeasible(w),
    })
}

type Atoms = (Vec<f64>, Vec<Vec<usize>>);

fn solve(d: &Density, atoms: &[Vec<usize>], k: usize, tol: f64) -> Result<Membership<Atoms>> {
    let n = atoms[0].len();
    let row_of = |a: usize, b: usize, x: usize, y: usize| ((x * n + y) * k + a) * k + b;
    let tensor_len = n * n * k * k;

    let mut hit = vec![false; tensor_len];
    for f in atoms {
        for x in 0..n {
            for y in 0..n {
                hit[row_of(f[x], f[y], x, y)] = true;
            }
        }
    }
    let target = d.as_slice();

    // mass on a tuple no atom can reach separates immediately
    if let Some((r, &v)) = target
        .iter()
        .enumerate()
        .filter(|(r, v)| !hit[*r] && v.abs() > tol)
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
    {
        let mut coeffs = vec![0.0; tensor_len];
        coeffs[r] = v.signum();
        return Ok(Membership::Infeasible(certificate(d, atoms, k, coeffs, 0.0)));
    }

    let rows: Vec<usize> = (0..tensor_len).filter(|&r| hit[r]).collect();
    let mut slot = vec![usize::MAX; tensor_len];
    for (i, &r) in rows.iter().enumerate() {
        slot[r] = i;
    }
    let m = rows.len() + 1;
    let mut a = vec![vec![0.0; atoms.len()]; m];
    for (j, f) in atoms.iter().enumerate() {
        for x in 0..n {
            for y in 0..n {
                a[slot[row_of(f[x], f[y], x, y)]][j] = 1.0;
            }
        }
        a[m - 1][j] = 1.0;
    }
    let mut b: Vec<f64> = rows.iter().map(|&r| target[r]).collect();
    b.push(1.0);

    let sol = phase_one(&a, &b)?;
    if sol.residual <= tol {
        let total: f64 = sol.x.iter().sum();
        let (weights, support): (Vec<f64>, Vec<Vec<usize>>) = sol
            .x
            .iter()
            .zip(atoms)
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, f)| (w / total, f.clone()))
            .unzip();
        return Ok(Membership::Member((weights, support)));
    }

    let mut coeffs = vec![0.0; tensor_len];
    for (i, &r) in rows.iter().enumerate() {
        coeffs[r] = sol.y[i];
    }
    Ok(Membership::Infeasible(certificate(d, atoms, k, coeffs, sol.y[m - 1])))
}

fn certificate(d: &Density, atoms: &[Vec<usize>], k: usize, mut coeffs: Vec<f64>, mut offset: f64) -> SeparatingFunctional {
    let n = atoms[0].len();
    let scale = coeffs.iter().map(|c| c.abs()).fold(offset.abs(), f64::max);
    if scale > 0.0 {
        coeffs.iter_mut().for_each(|c| *c /= scale);
        offset /= scale;
    }
    let coefficients = Density::new(n, n, k, k, coeffs).expect("coefficient tensor matches density shape");
    let mut f = SeparatingFunctional {
        coefficients,
        offset,
        value_on_input: 0.0,
        max_on_atoms: f64::NEG_INFINITY,
    };
    f.value_on_input = f.evaluate(d);
    f.max_on_atoms = atoms
        .iter()
        .map(|g| f.evaluate(&Density::deterministic(g, k)))
        .fold(f64::NEG_INFINITY, f64::max);
    f
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    // next lexicographic permutation
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("pivot exists");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// All functions `0..n -> 0..k` in lexicographic order.
pub(crate) fn functions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(k.pow(n as u32));
    let mut f = vec![0; n];
    loop {
        out.push(f.clone());
        let Some(pos) = (0..n).rev().find(|&i| f[i] + 1 < k) else {
            return out;
        };
        f[pos] += 1;
        f[pos + 1..].iter_mut().for_each(|v| *v = 0);
    }
}
