//! Dense phase-1 simplex for `A x = b, x >= 0` feasibility.
//!
//! Artificial variables `s` give the auxiliary problem
//! `min 1's  s.t.  A x + s = b, x, s >= 0` (rows with `b < 0` are negated
//! first). Pivoting uses Bland's rule, so the method terminates on the
//! heavily degenerate systems produced by deterministic-strategy polytopes.
//! At the optimum the simplex multipliers `y` satisfy `A' y <= 0` and
//! `b' y = min 1's`, which is a Farkas certificate whenever the optimum is
//! positive.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone)]
pub(crate) struct PhaseOne {
    /// Basic feasible point of the auxiliary problem restricted to `x`.
    pub x: Vec<f64>,
    /// Optimal auxiliary objective: total artificial mass left over.
    pub residual: f64,
    /// Simplex multipliers for the original (un-negated) rows.
    pub y: Vec<f64>,
}

pub(crate) fn phase_one(a: &[Vec<f64>], b: &[f64]) -> Result<PhaseOne> {
    let m = a.len();
    assert_eq!(m, b.len(), "row count mismatch");
    let c = a.first().map_or(0, Vec::len);
    let width = c + m + 1;
    let rhs = c + m;

    let sign: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let mut t = vec![0.0; m * width];
    for i in 0..m {
        let row = &mut t[i * width..(i + 1) * width];
        for j in 0..c {
            row[j] = sign[i] * a[i][j];
        }
        row[c + i] = 1.0;
        row[rhs] = sign[i] * b[i];
    }
    // reduced costs; last entry holds minus the objective value
    let mut obj = vec![0.0; width];
    for i in 0..m {
        for j in 0..c {
            obj[j] -= t[i * width + j];
        }
        obj[rhs] -= t[i * width + rhs];
    }
    let mut basis: Vec<usize> = (c..c + m).collect();

    let mut pivots = 0;
    while let Some(enter) = (0..rhs).find(|&j| obj[j] < -PIVOT_EPS) {
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let coef = t[i * width + enter];
            if coef > PIVOT_EPS {
                let ratio = t[i * width + rhs] / coef;
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best - 1e-14 || (ratio <= best + 1e-14 && basis[i] < basis[l]),
                };
                if better {
                    best = ratio.min(best);
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            // unreachable for a bounded auxiliary objective
            return Err(Error::InternalMismatch("phase-1 simplex reported an unbounded ray".into()));
        };
        pivot(&mut t, &mut obj, width, m, r, enter);
        basis[r] = enter;
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::TooLarge(format!("simplex exceeded {MAX_PIVOTS} pivots")));
        }
    }

    let mut x = vec![0.0; c];
    for (i, &j) in basis.iter().enumerate() {
        if j < c {
            x[j] = t[i * width + rhs].max(0.0);
        }
    }
    let y = (0..m).map(|i| sign[i] * (1.0 - obj[c + i])).collect();
    Ok(PhaseOne {
        x,
        residual: -obj[rhs],
        y,
    })
}

fn pivot(t: &mut [f64], obj: &mut [f64], width: usize, m: usize, r: usize, col: usize) {
    let inv = 1.0 / t[r * width + col];
    for v in &mut t[r * width..(r + 1) * width] {
        *v *= inv;
    }
    let pivot_row: Vec<f64> = t[r * width..(r + 1) * width].to_vec();
    for i in (0..m).filter(|&i| i != r) {
        let f = t[i * width + col];
        if f != 0.0 {
            for (v, p) in t[i * width..(i + 1) * width].iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            t[i * width + col] = 0.0;
        }
    }
    let f = obj[col];
    if f != 0.0 {
        for (v, p) in obj.iter_mut().zip(&pivot_row) {
            *v -= f * p;
        }
        obj[col] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasible_system() {
        // x1 + x2 = 1, x1 - x2 = 0.5  ->  x = (0.75, 0.25)
        let a = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        let out = phase_one(&a, &[1.0, 0.5]).unwrap();
        assert!(out.residual.abs() < 1e-12);
        assert!((out.x[0] - 0.75).abs() < 1e-12 && (out.x[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn infeasible_system_has_farkas_certificate() {
        // x1 + x2 = 1, x1 + x2 = 2 is inconsistent
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let b = [1.0, 2.0];
        let out = phase_one(&a, &b).unwrap();
        assert!(out.residual > 0.5);
        for j in 0..2 {
            let aty: f64 = (0..2).map(|i| a[i][j] * out.y[i]).sum();
            assert!(aty <= 1e-12);
        }
        let bty: f64 = (0..2).map(|i| b[i] * out.y[i]).sum();
        assert!((bty - out.residual).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_rows() {
        // -x1 = -2 is feasible with x1 = 2
        let out = phase_one(&[vec![-1.0]], &[-2.0]).unwrap();
        assert!(out.residual.abs() < 1e-12);
        assert!((out.x[0] - 2.0).abs() < 1e-12);
        // x1 = -1 needs x1 < 0
        let out = phase_one(&[vec![1.0]], &[-1.0]).unwrap();
        assert!(out.residual > 0.5);
        assert!(-out.y[0] > 0.5 && out.y[0] * 1.0 <= 1e-12);
    }

    #[test]
    fn redundant_degenerate_rows() {
        let a = vec![vec![1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], vec![0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let out = phase_one(&a, &[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(out.residual.abs() < 1e-12);
        assert!((out.x[0] + out.x[2] - 1.0).abs() < 1e-12);
    }
}
