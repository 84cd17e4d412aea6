//! Dense primal simplex for `maximize c·x  s.t.  A x ≤ b` with `b ≥ 0`.
//!
//! Every LP in this crate has that shape (the zero form is always feasible),
//! so the slack basis is an initial feasible basis and no phase 1 is needed.
//! Variables are nonnegative unless marked free; free variables are split
//! into a difference of two nonnegative columns.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct LinearProgram {
    objective: Vec<f64>,
    free: Vec<bool>,
    rows: Vec<(Vec<(usize, f64)>, f64)>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        let free = vec![false; objective.len()];
        LinearProgram { objective, free, rows: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    /// Adds `Σ coeff·x_var ≤ rhs`. Requires `rhs ≥ 0`.
    pub fn add_le(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) -> Result<()> {
        if !(rhs >= 0.0) {
            return Err(Error::InvalidArgument(format!("constraint rhs {rhs} must be nonnegative")));
        }
        if let Some((v, _)) = coeffs.iter().find(|(v, _)| *v >= self.objective.len()) {
            return Err(Error::InvalidArgument(format!("unknown variable {v}")));
        }
        self.rows.push((coeffs, rhs));
        Ok(())
    }

    /// Adds `|Σ coeff·x_var| ≤ rhs` as two rows.
    pub fn add_abs_le(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) -> Result<()> {
        let negated = coeffs.iter().map(|&(v, c)| (v, -c)).collect();
        self.add_le(coeffs, rhs)?;
        self.add_le(negated, rhs)
    }

    pub fn maximize(&self) -> Result<LpSolution> {
        // column layout: for each var its + column, then - columns of free vars, then slacks
        let nv = self.objective.len();
        let mut neg_col = vec![usize::MAX; nv];
        let mut ncols = nv;
        for (v, &is_free) in self.free.iter().enumerate() {
            if is_free {
                neg_col[v] = ncols;
                ncols += 1;
            }
        }
        let structural = ncols;
        let m = self.rows.len();
        let width = structural + m + 1;
        let mut t = vec![0.0; (m + 1) * width];
        for (i, (coeffs, rhs)) in self.rows.iter().enumerate() {
            let row = &mut t[i * width..(i + 1) * width];
            for &(v, c) in coeffs {
                row[v] += c;
                if neg_col[v] != usize::MAX {
                    row[neg_col[v]] -= c;
                }
            }
            row[structural + i] = 1.0;
            row[width - 1] = *rhs;
        }
        // objective row holds reduced costs c_j - z_j; value accumulates negated in the rhs slot
        {
            let obj = &mut t[m * width..];
            for v in 0..nv {
                obj[v] = self.objective[v];
                if neg_col[v] != usize::MAX {
                    obj[neg_col[v]] = -self.objective[v];
                }
            }
        }
        let mut basis: Vec<usize> = (structural..structural + m).collect();
        let max_iter = 50 * (m + width) + 1000;
        let mut degenerate_run = 0usize;
        for _ in 0..max_iter {
            let obj = &t[m * width..(m + 1) * width - 1];
            let bland = degenerate_run > 50;
            let entering = if bland {
                obj.iter().position(|&c| c > COST_EPS)
            } else {
                obj.iter()
                    .enumerate()
                    .filter(|(_, &c)| c > COST_EPS)
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(j, _)| j)
            };
            let Some(col) = entering else {
                return Ok(self.extract(&t, &basis, width, structural, &neg_col));
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = t[i * width + col];
                if a > PIVOT_EPS {
                    let ratio = t[i * width + width - 1] / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => ratio < lr - 1e-15 || (ratio <= lr + 1e-15 && basis[i] < basis[li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, ratio)) = leave else {
                return Err(Error::Unbounded);
            };
            degenerate_run = if ratio.abs() < 1e-14 { degenerate_run + 1 } else { 0 };
            pivot(&mut t, width, m, row, col);
            basis[row] = col;
        }
        Err(Error::InvalidArgument("simplex iteration limit reached".into()))
    }

    fn extract(&self, t: &[f64], basis: &[usize], width: usize, structural: usize, neg_col: &[usize]) -> LpSolution {
        let mut cols = vec![0.0; structural];
        for (i, &b) in basis.iter().enumerate() {
            if b < structural {
                cols[b] = t[i * width + width - 1];
            }
        }
        let x: Vec<f64> = (0..self.objective.len())
            .map(|v| cols[v] - if neg_col[v] != usize::MAX { cols[neg_col[v]] } else { 0.0 })
            .collect();
        let value = self.objective.iter().zip(&x).map(|(c, xi)| c * xi).sum();
        LpSolution { value, x }
    }
}

fn pivot(t: &mut [f64], width: usize, m: usize, row: usize, col: usize) {
    let p = t[row * width + col];
    for j in 0..width {
        t[row * width + j] /= p;
    }
    let pivot_row: Vec<f64> = t[row * width..(row + 1) * width].to_vec();
    for i in 0..=m {
        if i == row {
            continue;
        }
        let f = t[i * width + col];
        if f == 0.0 {
            continue;
        }
        let r = &mut t[i * width..(i + 1) * width];
        for (x, &pr) in r.iter_mut().zip(&pivot_row) {
            *x -= f * pr;
        }
        r[col] = 0.0;
    }
}
