//! Dense-tableau primal simplex for the elastic feasibility problem
//!
//! ```text
//! minimize Σ(s⁺ + s⁻)   subject to   A·q + s⁺ − s⁻ = b,  q, s⁺, s⁻ ≥ 0.
//! ```
//!
//! The optimum is the ℓ1 distance from b to {A·q : q ≥ 0}; a zero optimum
//! yields a feasible q, a positive one yields dual values that form a Farkas
//! separating functional. The slack split keeps the tableau at full row rank
//! regardless of redundant equality rows, and Bland's rule prevents cycling
//! on the degenerate vertices these polytopes are full of.

use crate::error::{Error, Result};

const RCOST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-10;

/// Outcome of the elastic LP.
#[derive(Debug, Clone)]
pub struct ElasticSolution {
    /// Optimal ℓ1 residual Σ(s⁺ + s⁻).
    pub distance: f64,
    /// Structural solution q (length = number of A columns).
    pub q: Vec<f64>,
    /// Dual values y (length = number of rows), satisfying |y_i| ≤ 1,
    /// yᵀA ≤ 0 componentwise and yᵀb = distance at the optimum.
    pub y: Vec<f64>,
}

/// Solve the elastic problem for a dense column-major constraint matrix.
///
/// `columns[j]` is the j-th column of A; `b` the right-hand side.
pub fn solve_elastic(columns: &[Vec<f64>], b: &[f64]) -> Result<ElasticSolution> {
    let rows = b.len();
    let n = columns.len();
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::Dimension("LP column length mismatch".into()));
    }
    let total = n + 2 * rows; // q, s⁺, s⁻
    let width = total + 1; // + RHS

    // Tableau: `rows` constraint rows then the objective row.
    let mut t = vec![vec![0.0f64; width]; rows + 1];
    for (j, col) in columns.iter().enumerate() {
        for i in 0..rows {
            t[i][j] = col[i];
        }
    }
    for i in 0..rows {
        t[i][n + i] = 1.0; // s⁺
        t[i][n + rows + i] = -1.0; // s⁻
        t[i][total] = b[i];
    }
    // Flip rows with negative RHS so the starting basis is the identity.
    let mut basis = vec![0usize; rows];
    for i in 0..rows {
        if t[i][total] < 0.0 {
            for v in t[i].iter_mut() {
                *v = -*v;
            }
            basis[i] = n + rows + i; // s⁻ basic
        } else {
            basis[i] = n + i; // s⁺ basic
        }
    }
    // Objective: cost 1 on every slack. Reduced costs = c − Σ basic rows.
    for j in n..total {
        t[rows][j] = 1.0;
    }
    for i in 0..rows {
        let row = t[i].clone();
        for (j, v) in t[rows].iter_mut().enumerate() {
            *v -= row[j];
        }
    }

    let max_pivots = 50 * (rows + total) + 10_000;
    for _ in 0..max_pivots {
        // Bland: entering = lowest-index column with negative reduced cost.
        let mut entering = None;
        for j in 0..total {
            if t[rows][j] < -RCOST_TOL {
                entering = Some(j);
                break;
            }
        }
        let Some(col) = entering else {
            return Ok(extract(&t, &basis, n, rows, total));
        };
        // Ratio test, ties broken by lowest basic variable index (Bland).
        let mut leaving: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..rows {
            if t[i][col] > PIVOT_TOL {
                let ratio = t[i][total] / t[i][col];
                let better = match leaving {
                    None => true,
                    Some(prev) => {
                        ratio < best - 1e-12
                            || (ratio < best + 1e-12 && basis[i] < basis[prev])
                    }
                };
                if better {
                    best = ratio;
                    leaving = Some(i);
                }
            }
        }
        let Some(row) = leaving else {
            // The elastic objective is bounded below by 0; an unbounded ray
            // means the tableau degenerated.
            return Err(Error::Solver("elastic LP reported unbounded".into()));
        };
        pivot(&mut t, row, col);
        basis[row] = col;
    }
    Err(Error::Solver(format!(
        "simplex exceeded {max_pivots} pivots"
    )))
}

fn pivot(t: &mut [Vec<f64>], row: usize, col: usize) {
    let width = t[0].len();
    let inv = 1.0 / t[row][col];
    for v in t[row].iter_mut() {
        *v *= inv;
    }
    t[row][col] = 1.0;
    for i in 0..t.len() {
        if i == row {
            continue;
        }
        let factor = t[i][col];
        if factor == 0.0 {
            continue;
        }
        for j in 0..width {
            t[i][j] -= factor * t[row][j];
        }
        t[i][col] = 0.0;
    }
}

fn extract(
    t: &[Vec<f64>],
    basis: &[usize],
    n: usize,
    rows: usize,
    total: usize,
) -> ElasticSolution {
    let mut q = vec![0.0; n];
    let mut slack_sum = 0.0;
    for (i, &bv) in basis.iter().enumerate() {
        let value = t[i][total].max(0.0);
        if bv < n {
            q[bv] = value;
        } else {
            slack_sum += value;
        }
    }
    // Duals from the slack reduced costs: rc(s⁺_i) = 1 − y_i.
    let y = (0..rows).map(|i| 1.0 - t[rows][n + i]).collect();
    ElasticSolution {
        distance: slack_sum,
        q,
        y,
    }
}
