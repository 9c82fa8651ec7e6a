//! Random test systems: Haar-like unitaries, projections and quantum
//! permutations built from the standard constructions.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::QuantumPermutation;
use crate::densities::PermutationMixture;
use crate::linalg::{CMatrix, Complex64, DEFAULT_TOL};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `d x r` matrix with orthonormal columns (Gram-Schmidt on Gaussian
/// columns).
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, d: usize, r: usize) -> CMatrix {
    assert!(r <= d, "isometry needs r <= d");
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(r);
    while cols.len() < r {
        let mut v: Vec<Complex64> = (0..d).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let proj: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= proj * ci;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    CMatrix::from_fn(d, r, |i, j| cols[j][i])
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    random_isometry(rng, d, d)
}

/// Orthogonal projection onto a random `rank`-dimensional subspace of `C^d`.
pub fn random_projection<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> CMatrix {
    if rank == 0 {
        return CMatrix::zeros(d, d);
    }
    let v = random_isometry(rng, d, rank);
    &v * &v.adjoint()
}

pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut s: Vec<usize> = (0..n).collect();
    s.shuffle(rng);
    s
}

/// Up to `max_atoms` distinct random permutations of `[n]` with random weights.
pub fn random_permutation_mixture<R: Rng + ?Sized>(rng: &mut R, n: usize, max_atoms: usize) -> PermutationMixture {
    let atoms = rng.random_range(1..=max_atoms.max(1));
    let mut perms: Vec<Vec<usize>> = Vec::new();
    for _ in 0..atoms {
        let s = random_permutation(rng, n);
        if !perms.contains(&s) {
            perms.push(s);
        }
    }
    let raw: Vec<f64> = perms.iter().map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    PermutationMixture::new(raw.iter().map(|w| w / total).collect(), perms).expect("valid mixture")
}

/// Block-diagonal unitary respecting the ancilla blocks of `u`.
pub fn random_block_unitary<R: Rng + ?Sized>(rng: &mut R, u: &QuantumPermutation) -> CMatrix {
    let dim = u.total_dim();
    let mut w = CMatrix::zeros(dim, dim);
    let mut off = 0;
    for b in u.system().blocks() {
        w.set_block(off, off, &random_unitary(rng, b.d()));
        off += b.d();
    }
    w
}

/// Generic `block_pair` on `C^d`: two independent random projections of
/// rank strictly between 0 and `d`.
pub fn random_block_pair<R: Rng + ?Sized>(rng: &mut R, d: usize) -> QuantumPermutation {
    let d = d.max(2);
    let rp = rng.random_range(1..d);
    let rq = rng.random_range(1..d);
    let p = random_projection(rng, d, rp);
    let q = random_projection(rng, d, rq);
    QuantumPermutation::block_pair(&p, &q, DEFAULT_TOL).expect("random projections verify")
}

/// Which construction [`random_quantum_permutation`] used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    Classical,
    BlockPair,
    PaddedBlockPair,
    DirectSum,
    Conjugated,
}

/// Random quantum permutation with `n <= max_n` and ancilla dimension
/// `<= max_d`. Needs `max_n >= 2`; `block_pair` variants need `max_n >= 4`
/// and `max_d >= 2`.
pub fn random_quantum_permutation<R: Rng + ?Sized>(rng: &mut R, max_n: usize, max_d: usize) -> (Construction, QuantumPermutation) {
    assert!(max_n >= 2 && max_d >= 1, "need max_n >= 2 and max_d >= 1");
    let quantum = max_n >= 4 && max_d >= 2;
    let kind = if quantum { rng.random_range(0..5) } else { 0 };
    match kind {
        1 => {
            let d = rng.random_range(2..=max_d);
            (Construction::BlockPair, random_block_pair(rng, d))
        }
        2 if max_n >= 5 => {
            let d = rng.random_range(2..=max_d);
            let bp = random_block_pair(rng, d);
            let m = rng.random_range(1..=max_n - 4);
            let sigma = random_permutation(rng, m);
            let lifted = QuantumPermutation::tensor(
                &QuantumPermutation::from_permutation(&sigma).expect("bijection"),
                &QuantumPermutation::trivial(d),
            )
            .expect("tensor of verified systems");
            let (first, second) = if rng.random_bool(0.5) { (&bp, &lifted) } else { (&lifted, &bp) };
            let u = QuantumPermutation::index_sum(first, second).expect("shared ancilla");
            (Construction::PaddedBlockPair, u)
        }
        3 => {
            let d1 = rng.random_range(1..max_d);
            let d2 = rng.random_range(1..=max_d - d1);
            let part = |rng: &mut R, d: usize| {
                if d >= 2 && rng.random_bool(0.6) {
                    random_block_pair(rng, d)
                } else {
                    QuantumPermutation::from_permutation(&random_permutation(rng, 4)).expect("bijection")
                }
            };
            let u1 = part(rng, d1);
            let u2 = part(rng, d2);
            let w: f64 = rng.random_range(0.1..0.9);
            (Construction::DirectSum, QuantumPermutation::direct_sum(&u1, &u2, w, 1.0 - w).expect("same n"))
        }
        4 => {
            let (_, base) = random_quantum_permutation(rng, max_n, max_d);
            let w = random_block_unitary(rng, &base);
            let u = base.conjugate(&w, 1e-9).expect("block unitary");
            (Construction::Conjugated, u)
        }
        _ => {
            let n = rng.random_range(2..=max_n);
            let u = QuantumPermutation::from_permutation(&random_permutation(rng, n)).expect("bijection");
            (Construction::Classical, u)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_projection;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitaries_and_projections() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=4 {
            let u = random_unitary(&mut rng, d);
            assert!((&(&u.adjoint() * &u) - &CMatrix::identity(d)).max_abs() < 1e-12);
            for r in 0..=d {
                let p = random_projection(&mut rng, d, r);
                assert!(is_projection(&p, 1e-12));
                assert!((p.trace().re - r as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn generated_systems_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let (_, u) = random_quantum_permutation(&mut rng, 6, 4);
            assert!(u.n() <= 6 && u.total_dim() <= 4);
            assert!(u.system().verify(1e-9).pass());
        }
    }
}
