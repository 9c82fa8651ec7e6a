//! Conditional probability densities `p(a, b | x, y)` and their classes.
//!
//! Every accessor takes indices in the order they appear in the notation
//! `p(a, b | x, y)`: answers first, then questions.

mod local;
mod lp;

pub use local::{local_bisync_membership, local_sync_membership, DeterministicMixture, Membership, SeparatingFunctional, MAX_BISYNC_N, MAX_SYNC_COLUMNS};

use crate::error::{Error, Result};
use crate::games::Game;
use crate::report::{Check, CheckList, Worst};

/// Nonnegative tensor `p(a, b | x, y)` over `nA x nB` questions and
/// `kA x kB` answers.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    n_a: usize,
    n_b: usize,
    k_a: usize,
    k_b: usize,
    p: Vec<f64>,
}

impl Density {
    /// Wraps a tensor stored in `[x][y][a][b]` row-major order.
    pub fn new(n_a: usize, n_b: usize, k_a: usize, k_b: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != n_a * n_b * k_a * k_b || n_a == 0 || n_b == 0 || k_a == 0 || k_b == 0 {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a ({n_a},{n_b},{k_a},{k_b}) density",
                p.len()
            )));
        }
        Ok(Self { n_a, n_b, k_a, k_b, p })
    }

    /// Builds `p(a, b | x, y) = f(a, b, x, y)`.
    pub fn from_fn(n_a: usize, n_b: usize, k_a: usize, k_b: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut p = Vec::with_capacity(n_a * n_b * k_a * k_b);
        for x in 0..n_a {
            for y in 0..n_b {
                for a in 0..k_a {
                    for b in 0..k_b {
                        p.push(f(a, b, x, y));
                    }
                }
            }
        }
        Self { n_a, n_b, k_a, k_b, p }
    }

    /// Same question and answer sets for both players.
    pub fn square(n: usize, k: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        Self::from_fn(n, n, k, k, f)
    }

    pub fn uniform(n: usize, k: usize) -> Self {
        let v = 1.0 / (k * k) as f64;
        Self::square(n, k, |_, _, _, _| v)
    }

    /// Deterministic strategy `x -> f[x]` with `k` possible answers.
    pub fn deterministic(f: &[usize], k: usize) -> Self {
        Self::square(f.len(), k, |a, b, x, y| if a == f[x] && b == f[y] { 1.0 } else { 0.0 })
    }

    /// `p(a, b | x, y) = [a = sigma(x)] [b = sigma(y)]`.
    pub fn from_permutation(sigma: &[usize]) -> Result<Self> {
        check_bijection(sigma)?;
        Ok(Self::deterministic(sigma, sigma.len()))
    }

    /// The bisynchronous nonsignalling density on `Z_3` whose flip is not a
    /// density: `1/3` on `a = b` for equal questions, `1/3` on
    /// `a - b = 1 (mod 3)` for distinct questions.
    pub fn z3_counterexample() -> Self {
        Self::square(3, 3, |a, b, x, y| {
            let hit = if x == y { a == b } else { (a + 3 - b) % 3 == 1 };
            if hit {
                1.0 / 3.0
            } else {
                0.0
            }
        })
    }

    /// Synchronous nonsignalling density on two questions and two answers
    /// whose map is not completely positive: perfectly correlated answers
    /// except on the question pair `(1, 1)`, where they are anti-correlated.
    pub fn non_cp_synchronous_example() -> Self {
        Self::square(2, 2, |a, b, x, y| {
            let anti = x == 1 && y == 1;
            if (a == b) != anti {
                0.5
            } else {
                0.0
            }
        })
    }

    #[inline]
    fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((x * self.n_b + y) * self.k_a + a) * self.k_b + b
    }

    /// `p(a, b | x, y)`.
    #[inline]
    pub fn p(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[self.index(a, b, x, y)]
    }

    pub fn set(&mut self, a: usize, b: usize, x: usize, y: usize, value: f64) {
        let i = self.index(a, b, x, y);
        self.p[i] = value;
    }

    /// `(nA, nB, kA, kB)`.
    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.n_a, self.n_b, self.k_a, self.k_b)
    }

    /// `(n, k)` when both players share question and answer sets.
    pub fn square_shape(&self) -> Option<(usize, usize)> {
        (self.n_a == self.n_b && self.k_a == self.k_b).then_some((self.n_a, self.k_a))
    }

    /// Raw entries in `[x][y][a][b]` order.
    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn max_abs_diff(&self, other: &Density) -> f64 {
        assert_eq!(self.shape(), other.shape(), "density shape mismatch");
        self.p.iter().zip(&other.p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    fn questions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_a).flat_map(move |x| (0..self.n_b).map(move |y| (x, y)))
    }

    fn answers(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.k_a).flat_map(move |a| (0..self.k_b).map(move |b| (a, b)))
    }

    fn row_sum(&self, x: usize, y: usize) -> f64 {
        self.answers().map(|(a, b)| self.p(a, b, x, y)).sum()
    }

    /// Question pairs whose answer distribution does not sum to one, with
    /// the offending sums, in `(x, y)` order.
    pub fn normalization_violations(&self, tol: f64) -> Vec<((usize, usize), f64)> {
        self.questions()
            .map(|(x, y)| ((x, y), self.row_sum(x, y)))
            .filter(|(_, s)| (s - 1.0).abs() > tol)
            .collect()
    }

    /// Nonnegativity and per-question normalization.
    pub fn check_valid(&self, tol: f64) -> CheckList {
        let mut neg = Worst::default();
        for (x, y) in self.questions() {
            for (a, b) in self.answers() {
                let v = self.p(a, b, x, y);
                neg.observe(-v, || format!("p({a},{b}|{x},{y}) = {v:.3e}"));
            }
        }
        let bad_rows = self.normalization_violations(tol);
        let worst_row = self
            .questions()
            .map(|(x, y)| (self.row_sum(x, y) - 1.0).abs())
            .fold(0.0, f64::max);
        let witness = (!bad_rows.is_empty()).then(|| {
            bad_rows
                .iter()
                .map(|((x, y), s)| format!("({x},{y}) sums to {s:.6}"))
                .collect::<Vec<_>>()
                .join("; ")
        });
        CheckList(vec![
            neg.into_check("nonnegative", tol),
            Check::within("normalized", worst_row, tol, witness),
        ])
    }

    pub fn validate(&self, tol: f64) -> bool {
        self.check_valid(tol).pass()
    }

    fn require_valid(&self, tol: f64) -> Result<()> {
        let checks = self.check_valid(tol);
        let result = match checks.failures().next() {
            None => Ok(()),
            Some(c) => Err(Error::InvalidDensity(format!(
                "{} fails by {:.3e}{}",
                c.name,
                c.max_violation,
                c.witness.as_deref().map(|w| format!(" at {w}")).unwrap_or_default()
            ))),
        };
        result
    }

    fn require_square(&self) -> Result<(usize, usize)> {
        self.square_shape()
            .ok_or_else(|| Error::ShapeMismatch("both players need the same question and answer sets".into()))
    }

    /// Alice's marginal is independent of Bob's question and vice versa.
    pub fn check_nonsignalling(&self, tol: f64) -> Result<CheckList> {
        self.require_valid(tol)?;
        let mut alice = Worst::default();
        for x in 0..self.n_a {
            for a in 0..self.k_a {
                let m0: f64 = (0..self.k_b).map(|b| self.p(a, b, x, 0)).sum();
                for y in 1..self.n_b {
                    let m: f64 = (0..self.k_b).map(|b| self.p(a, b, x, y)).sum();
                    alice.observe((m - m0).abs(), || format!("a={a} x={x} y=0 vs y={y}"));
                }
            }
        }
        let mut bob = Worst::default();
        for y in 0..self.n_b {
            for b in 0..self.k_b {
                let m0: f64 = (0..self.k_a).map(|a| self.p(a, b, 0, y)).sum();
                for x in 1..self.n_a {
                    let m: f64 = (0..self.k_a).map(|a| self.p(a, b, x, y)).sum();
                    bob.observe((m - m0).abs(), || format!("b={b} y={y} x=0 vs x={x}"));
                }
            }
        }
        Ok(CheckList(vec![
            alice.into_check("alice_marginal_nonsignalling", tol),
            bob.into_check("bob_marginal_nonsignalling", tol),
        ]))
    }

    pub fn is_nonsignalling(&self, tol: f64) -> Result<bool> {
        Ok(self.check_nonsignalling(tol)?.pass())
    }

    /// `p(a, b | x, x) = 0` for `a != b`.
    pub fn check_synchronous(&self, tol: f64) -> Result<Check> {
        let (n, k) = self.require_square()?;
        self.require_valid(tol)?;
        let mut w = Worst::default();
        for x in 0..n {
            for a in 0..k {
                for b in (0..k).filter(|&b| b != a) {
                    let v = self.p(a, b, x, x);
                    w.observe(v.abs(), || format!("p({a},{b}|{x},{x}) = {v:.3e}"));
                }
            }
        }
        Ok(w.into_check("synchronous", tol))
    }

    /// `p(a, a | x, y) = 0` for `x != y`; the synchronous condition is
    /// checked separately.
    pub fn check_distinct_answers(&self, tol: f64) -> Result<Check> {
        let (n, k) = self.require_square()?;
        self.require_valid(tol)?;
        let mut w = Worst::default();
        for x in 0..n {
            for y in (0..n).filter(|&y| y != x) {
                for a in 0..k {
                    let v = self.p(a, a, x, y);
                    w.observe(v.abs(), || format!("p({a},{a}|{x},{y}) = {v:.3e}"));
                }
            }
        }
        Ok(w.into_check("distinct_questions_distinct_answers", tol))
    }

    pub fn is_synchronous_density(&self, tol: f64) -> Result<bool> {
        Ok(self.check_synchronous(tol)?.pass)
    }

    pub fn is_bisynchronous_density(&self, tol: f64) -> Result<bool> {
        Ok(self.check_synchronous(tol)?.pass && self.check_distinct_answers(tol)?.pass)
    }

    /// Largest mass placed on a losing tuple of `game`.
    pub fn check_perfect_for(&self, game: &Game, tol: f64) -> Result<Check> {
        if game.shape() != self.shape() {
            return Err(Error::ShapeMismatch(format!(
                "game shape {:?} vs density shape {:?}",
                game.shape(),
                self.shape()
            )));
        }
        let mut w = Worst::default();
        for [x, y, a, b] in game.zeros() {
            let v = self.p(a, b, x, y);
            w.observe(v, || format!("p({a},{b}|{x},{y}) = {v:.3e} on a losing tuple"));
        }
        Ok(w.into_check("perfect", tol))
    }

    pub fn is_perfect_for(&self, game: &Game, tol: f64) -> Result<bool> {
        Ok(self.check_perfect_for(game, tol)?.pass)
    }

    /// Exchanges the roles of questions and answers:
    /// `q(x, y | a, b) = p(a, b | x, y)`. The result need not be a density.
    pub fn flip(&self) -> Density {
        Density::from_fn(self.k_a, self.k_b, self.n_a, self.n_b, |x, y, a, b| self.p(a, b, x, y))
    }
}

/// `r(a, b | v, w) = sum_{x, y} q(a, b | x, y) p(x, y | v, w)`.
pub fn compose(q: &Density, p: &Density) -> Result<Density> {
    let (pn_a, pn_b, pk_a, pk_b) = p.shape();
    let (qn_a, qn_b, qk_a, qk_b) = q.shape();
    if (qn_a, qn_b) != (pk_a, pk_b) {
        return Err(Error::ShapeMismatch(format!(
            "outer density expects {qn_a}x{qn_b} questions, inner produces {pk_a}x{pk_b} answers"
        )));
    }
    Ok(Density::from_fn(pn_a, pn_b, qk_a, qk_b, |a, b, v, w| {
        let mut s = 0.0;
        for x in 0..pk_a {
            for y in 0..pk_b {
                s += q.p(a, b, x, y) * p.p(x, y, v, w);
            }
        }
        s
    }))
}

/// Entrywise convex combination.
pub fn mixture(ds: &[Density], weights: &[f64]) -> Result<Density> {
    let first = ds
        .first()
        .ok_or_else(|| Error::ShapeMismatch("mixture of no densities".into()))?;
    if ds.len() != weights.len() {
        return Err(Error::BadWeights(format!("{} weights for {} densities", weights.len(), ds.len())));
    }
    check_weights(weights, 1e-9)?;
    if ds.iter().any(|d| d.shape() != first.shape()) {
        return Err(Error::ShapeMismatch("mixture components differ in shape".into()));
    }
    let mut p = vec![0.0; first.p.len()];
    for (d, &w) in ds.iter().zip(weights) {
        for (acc, v) in p.iter_mut().zip(&d.p) {
            *acc += w * v;
        }
    }
    Ok(Density { p, ..first.clone() })
}

pub(crate) fn check_weights(weights: &[f64], tol: f64) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| w.is_nan() || **w < -tol) {
        return Err(Error::BadWeights(format!("negative weight {w}")));
    }
    let s: f64 = weights.iter().sum();
    if (s - 1.0).abs() > tol {
        return Err(Error::BadWeights(format!("weights sum to {s}")));
    }
    Ok(())
}

pub(crate) fn check_bijection(sigma: &[usize]) -> Result<()> {
    let n = sigma.len();
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || std::mem::replace(&mut seen[s], true) {
            return Err(Error::NotBijective(format!("{sigma:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

/// Convex combination of permutation densities.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationMixture {
    weights: Vec<f64>,
    permutations: Vec<Vec<usize>>,
}

impl PermutationMixture {
    pub fn new(weights: Vec<f64>, permutations: Vec<Vec<usize>>) -> Result<Self> {
        if weights.len() != permutations.len() || weights.is_empty() {
            return Err(Error::BadWeights(format!(
                "{} weights for {} permutations",
                weights.len(),
                permutations.len()
            )));
        }
        check_weights(&weights, 1e-9)?;
        let n = permutations[0].len();
        for s in &permutations {
            check_bijection(s)?;
            if s.len() != n {
                return Err(Error::ShapeMismatch("permutations act on different sets".into()));
            }
        }
        Ok(Self { weights, permutations })
    }

    pub fn n(&self) -> usize {
        self.permutations[0].len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn permutations(&self) -> &[Vec<usize>] {
        &self.permutations
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &[usize])> {
        self.weights.iter().copied().zip(self.permutations.iter().map(Vec::as_slice))
    }

    pub fn to_density(&self) -> Density {
        let n = self.n();
        let mut d = Density::square(n, n, |_, _, _, _| 0.0);
        for (w, s) in self.iter() {
            for x in 0..n {
                for y in 0..n {
                    let i = d.index(s[x], s[y], x, y);
                    d.p[i] += w;
                }
            }
        }
        d
    }
}
