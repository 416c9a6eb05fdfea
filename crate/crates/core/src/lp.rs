//! Dense tableau simplex for `max cᵀx  s.t.  A x ≤ b, x ≥ 0` with `b ≥ 0`.
//!
//! The slack basis is feasible because `b ≥ 0`, so no phase one is needed.
//! Pivoting follows Bland's rule, which cannot cycle.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
}

/// Solves the LP; returns `None` if it is unbounded.
pub fn maximize<T: Real>(c: &[T], a: &[Vec<T>], b: &[T]) -> Result<Option<LpSolution<T>>> {
    let nv = c.len();
    let nc = b.len();
    if a.len() != nc || a.iter().any(|r| r.len() != nv) {
        return Err(Error::Dimension("constraint matrix shape mismatch".into()));
    }
    if b.iter().any(|&x| x < T::zero()) {
        return Err(Error::Domain("right-hand side must be nonnegative".into()));
    }
    let width = nv + nc + 1;
    // Rows 0..nc are constraints, row nc is the reduced-cost row.
    let mut t = vec![vec![T::zero(); width]; nc + 1];
    for i in 0..nc {
        t[i][..nv].copy_from_slice(&a[i]);
        t[i][nv + i] = T::one();
        t[i][width - 1] = b[i];
    }
    for j in 0..nv {
        t[nc][j] = -c[j];
    }
    let mut basis: Vec<usize> = (nv..nv + nc).collect();
    let eps = T::epsilon() * T::lit(1e3);
    let cap = 50 * (nv + nc) + 100;
    for _ in 0..cap {
        let Some(col) = (0..nv + nc).find(|&j| t[nc][j] < -eps) else {
            let mut x = vec![T::zero(); nv];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < nv {
                    x[bv] = t[i][width - 1];
                }
            }
            return Ok(Some(LpSolution {
                x,
                objective: t[nc][width - 1],
            }));
        };
        let mut row = None;
        let mut best = T::infinity();
        for i in 0..nc {
            if t[i][col] > eps {
                let r = t[i][width - 1] / t[i][col];
                let better = match row {
                    None => true,
                    Some(k) => r < best || (r == best && basis[i] < basis[k]),
                };
                if better {
                    best = r;
                    row = Some(i);
                }
            }
        }
        let Some(row) = row else {
            return Ok(None);
        };
        let p = t[row][col];
        t[row].iter_mut().for_each(|x| *x /= p);
        let pivot_row = t[row].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != row {
                let f = r[col];
                if f != T::zero() {
                    for (x, &y) in r.iter_mut().zip(&pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
        basis[row] = col;
    }
    Err(Error::NoConvergence {
        what: "simplex pivoting".into(),
        iterations: cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let a = vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]];
        let s = maximize(&[3.0f64, 5.0], &a, &[4.0, 12.0, 18.0]).unwrap().unwrap();
        assert!((s.objective - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded() {
        let a = vec![vec![1.0f64, -1.0]];
        assert!(maximize(&[1.0, 1.0], &a, &[1.0]).unwrap().is_none());
    }

    #[test]
    fn degenerate_start() {
        let a = vec![vec![1.0f64, 1.0], vec![-1.0, 1.0], vec![1.0, 0.0]];
        let s = maximize(&[0.0, 1.0], &a, &[0.0, 0.0, 1.0]).unwrap().unwrap();
        assert!(s.objective.abs() < 1e-15);
    }
}
