//! Grid LP oracle for ‖A‖_{B^r} on small instances (n ≤ 2, k ≤ 1).
//!
//! The supremum is discretized: ω is a free vector of nodal values, subject
//! to |ω| ≤ 1 at every node and |Δ_{a_1}⋯Δ_{a_j} ω| / h^j ≤ 1 for every
//! compact j-th order difference along coordinate axes, j ≤ r. For k = 1 in
//! the plane the pointwise bound is the 32-gon circumscribing the unit disc.
//! This is independent of the certificate machinery in `lower`/`upper`.

use crate::chains::PointedChain;
use crate::error::{Error, Result};
use crate::lp::LinearProgram;

/// Half-circle directions used to approximate the Euclidean (comass) ball.
const POLYGON_DIRECTIONS: usize = 16;
const ON_GRID_TOL: f64 = 1e-9;

/// Uniform grid: `origin + h·i` for `0 ≤ i_d < counts[d]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub counts: Vec<usize>,
}

impl GridSpec {
    pub fn new(origin: Vec<f64>, spacing: f64, counts: Vec<usize>) -> Result<Self> {
        if !(spacing > 0.0) || origin.len() != counts.len() || counts.contains(&0) {
            return Err(Error::InvalidArgument("grid needs positive spacing and one count per axis".into()));
        }
        Ok(GridSpec { origin, spacing, counts })
    }

    /// Smallest grid with the given spacing whose nodes include every point
    /// of A, padded by `margin` nodes on each side.
    pub fn covering(a: &PointedChain, spacing: f64, margin: usize) -> Result<Self> {
        let n = a.dim();
        if a.is_empty() {
            return GridSpec::new(vec![0.0; n], spacing, vec![1 + 2 * margin; n]);
        }
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for t in a.terms() {
            for d in 0..n {
                lo[d] = lo[d].min(t.point[d]);
                hi[d] = hi[d].max(t.point[d]);
            }
        }
        let origin: Vec<f64> = lo.iter().map(|x| x - margin as f64 * spacing).collect();
        let counts =
            (0..n).map(|d| ((hi[d] - lo[d]) / spacing).round() as usize + 1 + 2 * margin).collect();
        GridSpec::new(origin, spacing, counts)
    }

    /// Halves the spacing; every node of `self` stays a node.
    pub fn refined(&self) -> GridSpec {
        GridSpec {
            origin: self.origin.clone(),
            spacing: self.spacing / 2.0,
            counts: self.counts.iter().map(|c| 2 * c - 1).collect(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.counts.iter().product()
    }

    fn linear(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.counts).rev().fold(0, |acc, (i, c)| acc * c + i)
    }

    fn multi(&self, mut lin: usize) -> Vec<usize> {
        self.counts
            .iter()
            .map(|c| {
                let i = lin % c;
                lin /= c;
                i
            })
            .collect()
    }

    /// Linear node index of a point, or [`Error::OffGrid`].
    pub fn node_of(&self, p: &[f64]) -> Result<usize> {
        let mut idx = Vec::with_capacity(p.len());
        for (d, x) in p.iter().enumerate() {
            let s = (x - self.origin[d]) / self.spacing;
            let i = s.round();
            if (s - i).abs() > ON_GRID_TOL || i < 0.0 || i as usize >= self.counts[d] {
                return Err(Error::OffGrid(p.to_vec()));
            }
            idx.push(i as usize);
        }
        Ok(self.linear(&idx))
    }
}

/// Oracle values on a grid and on its refinement.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub r: usize,
    pub spacing: f64,
    pub value: f64,
    pub refined_spacing: f64,
    pub refined_value: f64,
}

impl OracleReport {
    /// refined_value − value.
    pub fn trend(&self) -> f64 {
        self.refined_value - self.value
    }
}

/// Non-decreasing axis sequences of length j over `0..n`.
fn axis_words(n: usize, j: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, j: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == j {
            out.push(cur.clone());
            return;
        }
        for a in start..n {
            cur.push(a);
            rec(a, n, j, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, j, &mut Vec::new(), &mut out);
    out
}

/// Stencil of Δ_{a_1}⋯Δ_{a_j} (forward differences) as (offset, coefficient).
fn stencil(n: usize, word: &[usize]) -> Vec<(Vec<usize>, f64)> {
    let mut terms: Vec<(Vec<usize>, f64)> = vec![(vec![0; n], 1.0)];
    for &axis in word {
        let mut next: Vec<(Vec<usize>, f64)> = Vec::new();
        for (off, c) in &terms {
            let mut up = off.clone();
            up[axis] += 1;
            for (o, v) in [(up, *c), (off.clone(), -c)] {
                match next.iter_mut().find(|(x, _)| *x == o) {
                    Some(entry) => entry.1 += v,
                    None => next.push((o, v)),
                }
            }
        }
        terms = next.into_iter().filter(|(_, c)| *c != 0.0).collect();
    }
    terms
}

/// Adds |expr| ≤ 1 for a scalar expression, or the polygon bound for a
/// 2-component expression (one row list per component).
fn add_pointwise_bound(lp: &mut LinearProgram, components: &[Vec<(usize, f64)>]) -> Result<()> {
    if components.len() == 1 {
        return lp.add_abs_le(components[0].clone(), 1.0);
    }
    for l in 0..POLYGON_DIRECTIONS {
        let theta = l as f64 * std::f64::consts::PI / POLYGON_DIRECTIONS as f64;
        let (s, c) = theta.sin_cos();
        let mut row: Vec<(usize, f64)> = components[0].iter().map(|&(v, x)| (v, c * x)).collect();
        row.extend(components[1].iter().map(|&(v, x)| (v, s * x)));
        lp.add_abs_le(row, 1.0)?;
    }
    Ok(())
}

/// Solves the discretized dual problem on one grid.
pub fn oracle_value(a: &PointedChain, r: usize, grid: &GridSpec) -> Result<f64> {
    let (n, k) = (a.dim(), a.grade());
    if n == 0 || n > 2 || k > 1 {
        return Err(Error::UnsupportedOracle(format!("needs n ≤ 2 and k ≤ 1, got n = {n}, k = {k}")));
    }
    if grid.origin.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: grid.origin.len() });
    }
    let comps = if k == 0 { 1 } else { n };
    let nodes = grid.num_nodes();
    let var = |node: usize, comp: usize| node * comps + comp;

    let mut objective = vec![0.0; nodes * comps];
    for t in a.terms() {
        let node = grid.node_of(&t.point)?;
        for (c, &alpha) in t.vector.coeffs().iter().enumerate() {
            objective[var(node, c)] += alpha;
        }
    }
    let mut lp = LinearProgram::new(objective);
    for v in 0..nodes * comps {
        lp.set_free(v);
    }
    for node in 0..nodes {
        let rows: Vec<Vec<(usize, f64)>> = (0..comps).map(|c| vec![(var(node, c), 1.0)]).collect();
        add_pointwise_bound(&mut lp, &rows)?;
    }
    for j in 1..=r {
        let scale = grid.spacing.powi(j as i32);
        for word in axis_words(n, j) {
            let st = stencil(n, &word);
            let reach: Vec<usize> = (0..n).map(|d| word.iter().filter(|&&a| a == d).count()).collect();
            for node in 0..nodes {
                let idx = grid.multi(node);
                if idx.iter().zip(&reach).zip(&grid.counts).any(|((i, r), c)| i + r >= *c) {
                    continue;
                }
                let rows: Vec<Vec<(usize, f64)>> = (0..comps)
                    .map(|comp| {
                        st.iter()
                            .map(|(off, coef)| {
                                let target: Vec<usize> = idx.iter().zip(off).map(|(i, o)| i + o).collect();
                                (var(grid.linear(&target), comp), coef / scale)
                            })
                            .collect()
                    })
                    .collect();
                add_pointwise_bound(&mut lp, &rows)?;
            }
        }
    }
    Ok(lp.maximize()?.value)
}

/// Oracle value at `grid` and at its refinement.
pub fn norm_oracle_grid(a: &PointedChain, r: usize, grid: &GridSpec) -> Result<OracleReport> {
    let value = oracle_value(a, r, grid)?;
    let fine = grid.refined();
    let refined_value = oracle_value(a, r, &fine)?;
    Ok(OracleReport { r, spacing: grid.spacing, value, refined_spacing: fine.spacing, refined_value })
}
