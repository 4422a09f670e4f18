//! Dense tableau simplex for small linear programs in canonical form
//!
//! ```text
//! maximize c.x  subject to  A x <= b,  x >= 0,  with b >= 0
//! ```
//!
//! The origin is feasible, so the slack basis starts the method. Bland's rule
//! prevents cycling; problem sizes here are a few dozen rows.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let n = c.len();
    let m = a.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::invalid("simplex: inconsistent dimensions"));
    }
    if b.iter().any(|&bi| bi < 0.0) {
        return Err(Error::invalid("simplex: right-hand side must be nonnegative"));
    }
    // Tableau rows: [A | I | b]; last row: [-c | 0 | 0].
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        t[i][..n].copy_from_slice(&a[i]);
        t[i][n + i] = 1.0;
        t[i][width - 1] = b[i];
    }
    for j in 0..n {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    for _ in 0..10_000 {
        // Entering column: lowest index with negative reduced cost.
        let Some(col) = (0..n + m).find(|&j| t[m][j] < -PIVOT_EPS) else {
            let mut x = vec![0.0; n];
            for (i, &bi) in basis.iter().enumerate() {
                if bi < n {
                    x[bi] = t[i][width - 1];
                }
            }
            return Ok(LpSolution {
                x,
                objective: t[m][width - 1],
            });
        };
        // Ratio test, ties broken by lowest basis index.
        let mut row = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][col] > PIVOT_EPS {
                let ratio = t[i][width - 1] / t[i][col];
                let better = match row {
                    None => true,
                    Some(r) => ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[i] < basis[r]),
                };
                if better {
                    best = ratio;
                    row = Some(i);
                }
            }
        }
        let Some(r) = row else {
            return Err(Error::Numeric("simplex: unbounded objective".into()));
        };
        let piv = t[r][col];
        for v in t[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = t[r].clone();
        for (i, ti) in t.iter_mut().enumerate() {
            if i != r {
                let f = ti[col];
                if f != 0.0 {
                    for (v, p) in ti.iter_mut().zip(&pivot_row) {
                        *v -= f * p;
                    }
                }
            }
        }
        basis[r] = col;
    }
    Err(Error::Numeric("simplex: iteration limit".into()))
}
