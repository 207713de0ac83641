//! Dense two-phase simplex with Bland's rule.
//!
//! Solves `maximize c·x subject to A x <= b, x >= 0` for small dense
//! problems (a few thousand variables at most). Bland's rule makes cycling
//! impossible, at the price of more pivots than steepest-edge rules.

use alloc::vec;
use alloc::vec::Vec;

use crate::{NdsError, Result};

const TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 200_000;

/// Optimal solution of a linear program.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    /// Optimal primal point.
    pub x: Vec<f64>,
    /// Optimal objective value.
    pub objective: f64,
    /// Pivots performed over both phases.
    pub pivots: usize,
}

struct Tableau {
    rows: usize,
    cols: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.t[r * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let p = self.t[pr * w + pc];
        for c in 0..w {
            self.t[pr * w + c] /= p;
        }
        self.t[pr * w + pc] = 1.0;
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.t[r * w + pc];
            if f != 0.0 {
                for c in 0..w {
                    let v = self.t[pr * w + c];
                    if v != 0.0 {
                        self.t[r * w + c] -= f * v;
                    }
                }
                self.t[r * w + pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Run simplex iterations maximizing the objective row; `allowed`
    /// filters entering columns.
    fn optimize(&mut self, allowed: &dyn Fn(usize) -> bool) -> Result<()> {
        let obj = self.rows;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(NdsError::LpIterationLimit(MAX_PIVOTS));
            }
            // The objective row stores z_j - c_j; a negative entry improves.
            let Some(pc) = (0..self.cols).find(|&c| allowed(c) && self.at(obj, c) < -TOL) else {
                return Ok(());
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > TOL {
                    let ratio = self.rhs(r) / a;
                    let better = match best {
                        None => true,
                        Some((br, _, bb)) => ratio < br - TOL || (ratio <= br + TOL && self.basis[r] < bb),
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            let Some((_, pr, _)) = best else {
                return Err(NdsError::LpUnbounded);
            };
            self.pivot(pr, pc);
        }
    }
}

/// Solve `maximize c·x s.t. A x <= b, x >= 0`. `a` is row-major with
/// `b.len()` rows of `c.len()` entries.
pub fn maximize(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let m = b.len();
    let n = c.len();
    if a.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(NdsError::InvalidSpec("constraint matrix shape does not match b and c".into()));
    }
    let flipped: Vec<bool> = b.iter().map(|&v| v < 0.0).collect();
    let n_art = flipped.iter().filter(|&&f| f).count();
    // Columns: originals, one slack per row, then artificials.
    let cols = n + m + n_art;
    let w = cols + 1;
    let mut t = vec![0.0; (m + 1) * w];
    let mut basis = vec![0; m];
    let mut art = n + m;
    for i in 0..m {
        let sign = if flipped[i] { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i * w + j] = sign * a[i][j];
        }
        t[i * w + n + i] = sign;
        t[i * w + cols] = sign * b[i];
        if flipped[i] {
            t[i * w + art] = 1.0;
            basis[i] = art;
            art += 1;
        } else {
            basis[i] = n + i;
        }
    }
    let mut tab = Tableau { rows: m, cols, t, basis, pivots: 0 };

    if n_art > 0 {
        // Phase 1: maximize -Σ art, i.e. objective row z - c with c_art = -1.
        let obj = m;
        for c in n + m..cols {
            tab.t[obj * w + c] = 1.0;
        }
        for r in 0..m {
            if tab.basis[r] >= n + m {
                for c in 0..w {
                    tab.t[obj * w + c] -= tab.t[r * w + c];
                }
            }
        }
        tab.optimize(&|_| true)?;
        let infeas = -tab.rhs(obj);
        let scale = b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        if infeas.abs() > 1e-8 * scale {
            return Err(NdsError::LpInfeasible);
        }
        // Drive artificials out of the basis where possible.
        for r in 0..m {
            if tab.basis[r] >= n + m {
                if let Some(pc) = (0..n + m).find(|&c| tab.at(r, c).abs() > TOL) {
                    tab.pivot(r, pc);
                }
            }
        }
    }

    // Phase 2 objective row: z_j - c_j with basic columns priced out.
    let obj = m;
    for c in 0..w {
        tab.t[obj * w + c] = 0.0;
    }
    for j in 0..n {
        tab.t[obj * w + j] = -c[j];
    }
    for r in 0..m {
        let bj = tab.basis[r];
        let cb = if bj < n { c[bj] } else { 0.0 };
        if cb != 0.0 {
            for col in 0..w {
                tab.t[obj * w + col] += cb * tab.t[r * w + col];
            }
        }
    }
    tab.optimize(&|col| col < n + m)?;

    let mut x = vec![0.0; n];
    for r in 0..m {
        if tab.basis[r] < n {
            x[tab.basis[r]] = tab.rhs(r).max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, objective, pivots: tab.pivots })
}

/// Solve `minimize c·x s.t. A x >= b, x >= 0`.
pub fn minimize_covering(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let neg_a: Vec<Vec<f64>> = a.iter().map(|row| row.iter().map(|v| -v).collect()).collect();
    let neg_b: Vec<f64> = b.iter().map(|v| -v).collect();
    let neg_c: Vec<f64> = c.iter().map(|v| -v).collect();
    let mut sol = maximize(&neg_a, &neg_b, &neg_c)?;
    sol.objective = c.iter().zip(&sol.x).map(|(ci, xi)| ci * xi).sum();
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let a = vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]];
        let sol = maximize(&a, &[4.0, 12.0, 18.0], &[3.0, 5.0]).unwrap();
        assert!((sol.objective - 36.0).abs() < 1e-9);
        assert!((sol.x[0] - 2.0).abs() < 1e-9 && (sol.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn fractional_vertex_cover_of_a_triangle() {
        // Cover three elements with three pairs: optimum 1.5 at (1/2, 1/2, 1/2).
        let a = vec![vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0]];
        let sol = minimize_covering(&a, &[1.0; 3], &[1.0; 3]).unwrap();
        assert!((sol.objective - 1.5).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let a = vec![vec![1.0]];
        assert_eq!(minimize_covering(&[vec![0.0]], &[1.0], &[1.0]).unwrap_err(), NdsError::LpInfeasible);
        assert_eq!(maximize(&a, &[-1.0], &[1.0]).unwrap_err(), NdsError::LpInfeasible);
        assert_eq!(maximize(&[vec![-1.0]], &[1.0], &[1.0]).unwrap_err(), NdsError::LpUnbounded);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Zero right-hand sides make the starting vertex degenerate.
        let a = vec![vec![1.0, -1.0, 0.0], vec![1.0, 0.0, -1.0], vec![0.0, 1.0, 1.0]];
        let sol = maximize(&a, &[0.0, 0.0, 2.0], &[1.0, 1.0, 1.0]).unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-9, "{}", sol.objective);
    }
}
