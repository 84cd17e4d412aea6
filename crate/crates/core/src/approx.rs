//! Geometric cells, their midpoint-rule pointed chains, and convergence checks.
//!
//! A cell of dimension k in ℝⁿ is discretized into subcells; each subcell
//! contributes one term at its barycenter carrying its oriented tangent
//! k-vector, scaled to the subcell's k-volume.

use std::collections::BTreeMap;

use crate::chains::PointedChain;
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::exterior::KVector;
use crate::forms::FormSpec;
use crate::norms::upper;

/// Relative size below which a tangent k-vector counts as degenerate.
const DEGENERACY_TOL: f64 = 1e-12;
/// Grid used to compare floating vertices when cancelling boundaries.
const VERTEX_QUANTUM: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    /// `[v0, v1]`, a 1-cell.
    Segment,
    /// Convex hull of k + 1 vertices; one vertex is a point.
    Simplex,
    /// Parallelepiped `v0 + Σ t_i (v_i − v0)`, `t ∈ [0,1]^k`.
    Box,
    /// Piecewise-linear curve through samples taken at uniform parameter steps.
    Curve,
}

impl CellKind {
    pub fn name(self) -> &'static str {
        match self {
            CellKind::Segment => "segment",
            CellKind::Simplex => "simplex",
            CellKind::Box => "box",
            CellKind::Curve => "curve",
        }
    }
}

impl std::str::FromStr for CellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "segment" => Ok(CellKind::Segment),
            "simplex" | "triangle" => Ok(CellKind::Simplex),
            "box" | "square" => Ok(CellKind::Box),
            "curve" => Ok(CellKind::Curve),
            other => Err(Error::InvalidArgument(format!("unknown cell kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    kind: CellKind,
    vertices: Vec<Vec<f64>>,
    orientation: f64,
}

impl Cell {
    /// Validates shape and nondegeneracy. `orientation` must be ±1.
    pub fn new(kind: CellKind, vertices: Vec<Vec<f64>>, orientation: f64) -> Result<Self> {
        if orientation != 1.0 && orientation != -1.0 {
            return Err(Error::InvalidArgument(format!("orientation must be ±1, got {orientation}")));
        }
        let n = vertices.first().map(Vec::len).ok_or_else(|| Error::DegenerateCell("no vertices".into()))?;
        if let Some(v) = vertices.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        let count = vertices.len();
        match kind {
            CellKind::Segment if count != 2 => {
                return Err(Error::DegenerateCell(format!("segment needs 2 vertices, got {count}")))
            }
            CellKind::Curve if count < 2 => return Err(Error::DegenerateCell("curve needs at least 2 samples".into())),
            CellKind::Simplex | CellKind::Box if count - 1 > n => {
                return Err(Error::GradeOverflow { grade: count - 1, dim: n })
            }
            _ => {}
        }
        let cell = Cell { kind, vertices, orientation };
        match kind {
            CellKind::Curve => {
                if cell.vertices.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::DegenerateCell("repeated curve sample".into()));
                }
            }
            _ => {
                let t = cell.tangent()?;
                let scale: f64 = cell.edges().iter().map(|e| norm(e)).product();
                if cell.grade() > 0 && t.euclidean_norm() <= DEGENERACY_TOL * scale {
                    return Err(Error::DegenerateCell(format!("{} has zero volume", kind.name())));
                }
            }
        }
        Ok(cell)
    }

    pub fn segment(a: &[f64], b: &[f64]) -> Result<Self> {
        Cell::new(CellKind::Segment, vec![a.to_vec(), b.to_vec()], 1.0)
    }

    pub fn simplex(vertices: Vec<Vec<f64>>) -> Result<Self> {
        Cell::new(CellKind::Simplex, vertices, 1.0)
    }

    /// Box with corner `origin` and edge vectors `edges`.
    pub fn parallelepiped(origin: &[f64], edges: &[Vec<f64>]) -> Result<Self> {
        let mut vertices = vec![origin.to_vec()];
        vertices.extend(edges.iter().map(|e| add(origin, e)));
        Cell::new(CellKind::Box, vertices, 1.0)
    }

    /// `[0,1]^n` with the standard orientation.
    pub fn unit_cube(n: usize) -> Result<Self> {
        let edges: Vec<Vec<f64>> = (0..n).map(|i| unit(n, i)).collect();
        Cell::parallelepiped(&vec![0.0; n], &edges)
    }

    pub fn point(p: &[f64], orientation: f64) -> Result<Self> {
        Cell::new(CellKind::Simplex, vec![p.to_vec()], orientation)
    }

    /// Samples `f` at `samples + 1` uniform parameter values in `[0, 1]`.
    pub fn curve_from_fn(f: impl Fn(f64) -> Vec<f64>, samples: usize) -> Result<Self> {
        let samples = samples.max(1);
        let pts = (0..=samples).map(|i| f(i as f64 / samples as f64)).collect();
        Cell::new(CellKind::Curve, pts, 1.0)
    }

    pub fn kind(&self) -> CellKind {
        self.kind
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn grade(&self) -> usize {
        match self.kind {
            CellKind::Segment | CellKind::Curve => 1,
            CellKind::Simplex | CellKind::Box => self.vertices.len() - 1,
        }
    }

    pub fn with_orientation(&self, orientation: f64) -> Result<Self> {
        Cell::new(self.kind, self.vertices.clone(), orientation)
    }

    fn edges(&self) -> Vec<Vec<f64>> {
        let v0 = &self.vertices[0];
        self.vertices[1..].iter().map(|v| sub(v, v0)).collect()
    }

    /// Oriented tangent k-vector whose mass is the k-volume (flat cells only).
    fn tangent(&self) -> Result<KVector> {
        let n = self.dim();
        let mut t = KVector::scalar(n, self.orientation);
        for e in self.edges() {
            t = t.wedge(&KVector::vector(&e))?;
        }
        if self.kind == CellKind::Simplex {
            t = t.scale(1.0 / factorial(self.grade()));
        }
        Ok(t)
    }

    /// k-volume; for curves, the length of the sampled polyline.
    pub fn volume(&self) -> f64 {
        match self.kind {
            CellKind::Curve => self.vertices.windows(2).map(|w| norm(&sub(&w[1], &w[0]))).sum(),
            _ => self.tangent().map(|t| t.euclidean_norm()).unwrap_or(0.0),
        }
    }

    /// All corners; for boxes the 2^k vertices of the parallelepiped.
    fn corners(&self) -> Vec<Vec<f64>> {
        match self.kind {
            CellKind::Box => {
                let edges = self.edges();
                (0..1usize << edges.len())
                    .map(|mask| {
                        let mut p = self.vertices[0].clone();
                        for (i, e) in edges.iter().enumerate() {
                            if mask & (1 << i) != 0 {
                                p = add(&p, e);
                            }
                        }
                        p
                    })
                    .collect()
            }
            CellKind::Curve => vec![self.vertices[0].clone(), self.vertices[self.vertices.len() - 1].clone()],
            _ => self.vertices.clone(),
        }
    }

    fn sign_key(&self) -> Result<f64> {
        if self.kind == CellKind::Curve {
            return Ok(self.orientation);
        }
        let t = self.tangent()?;
        let lead = t.coeffs().iter().copied().find(|x| x.abs() > DEGENERACY_TOL * t.euclidean_norm());
        Ok(lead.map_or(self.orientation, f64::signum))
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Multi-indices of `{0..m}^k` in lexicographic order.
fn grid_indices(m: usize, k: usize) -> Vec<Vec<usize>> {
    let total = m.pow(k as u32);
    (0..total)
        .map(|mut lin| {
            let mut idx = vec![0; k];
            for slot in idx.iter_mut().rev() {
                *slot = lin % m;
                lin /= m;
            }
            idx
        })
        .collect()
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Barycentric-lattice subsimplices of the ordered simplex
/// `{m ≥ x_1 ≥ … ≥ x_k ≥ 0}`: the Kuhn simplices of `[0,m]^k` that lie inside
/// it. Returns each subsimplex's vertices in lattice coordinates.
fn kuhn_subsimplices(m: usize, k: usize) -> Vec<Vec<Vec<usize>>> {
    let perms = permutations(k);
    let mut out = Vec::new();
    for base in grid_indices(m, k) {
        for perm in &perms {
            let mut verts = vec![base.clone()];
            let mut cur = base.clone();
            for &axis in perm {
                cur[axis] += 1;
                verts.push(cur.clone());
            }
            let inside = verts.iter().all(|v| v.windows(2).all(|w| w[0] >= w[1]) && v.first().is_none_or(|&x| x <= m));
            if inside {
                out.push(verts);
            }
        }
    }
    out
}

/// Maps a lattice point of the ordered simplex to the simplex `verts`.
fn ordered_to_simplex(x: &[usize], m: usize, verts: &[Vec<f64>]) -> Vec<f64> {
    let k = x.len();
    let y: Vec<f64> = x.iter().map(|&v| v as f64 / m as f64).collect();
    let mut p = verts[0].clone();
    for j in 1..=k {
        let lambda = if j == k { y[k - 1] } else { y[j - 1] - y[j] };
        for (pi, (vj, v0)) in p.iter_mut().zip(verts[j].iter().zip(&verts[0])) {
            *pi += lambda * (vj - v0);
        }
    }
    p
}

/// Midpoint-rule pointed chain with `m` subdivisions per edge.
pub fn riemann_chain(c: &Cell, m: usize) -> Result<PointedChain> {
    riemann_chain_with(c, m, Exec::default())
}

pub fn riemann_chain_with(c: &Cell, m: usize, exec: Exec) -> Result<PointedChain> {
    if m == 0 {
        return Err(Error::InvalidArgument("subdivision count must be at least 1".into()));
    }
    let (n, k) = (c.dim(), c.grade());
    if k == 0 {
        return PointedChain::point(&c.vertices[0], KVector::scalar(n, c.orientation));
    }
    let terms: Vec<(Vec<f64>, KVector)> = match c.kind {
        CellKind::Segment | CellKind::Box => {
            let edges = c.edges();
            let piece = c.tangent()?.scale(1.0 / (m as f64).powi(k as i32));
            let idx = grid_indices(m, k);
            exec::map_slice(exec, &idx, |ix| {
                let mut p = c.vertices[0].clone();
                for (e, &i) in edges.iter().zip(ix) {
                    let t = (i as f64 + 0.5) / m as f64;
                    for (pd, ed) in p.iter_mut().zip(e) {
                        *pd += t * ed;
                    }
                }
                (p, piece.clone())
            })
        }
        CellKind::Simplex => {
            let piece = c.tangent()?.scale(1.0 / (m as f64).powi(k as i32));
            let subs = kuhn_subsimplices(m, k);
            exec::map_slice(exec, &subs, |verts| {
                let mut bary = vec![0.0; n];
                for v in verts {
                    let q = ordered_to_simplex(v, m, &c.vertices);
                    for (b, x) in bary.iter_mut().zip(&q) {
                        *b += x / (k + 1) as f64;
                    }
                }
                (bary, piece.clone())
            })
        }
        CellKind::Curve => {
            let segments = c.vertices.len() - 1;
            let at = |s: f64| -> Vec<f64> {
                let u = (s * segments as f64).clamp(0.0, segments as f64);
                let i = (u.floor() as usize).min(segments - 1);
                let f = u - i as f64;
                c.vertices[i].iter().zip(&c.vertices[i + 1]).map(|(a, b)| a + f * (b - a)).collect()
            };
            let idx: Vec<usize> = (0..m).collect();
            exec::map_slice(exec, &idx, |&i| {
                let (s0, s1) = (i as f64 / m as f64, (i + 1) as f64 / m as f64);
                let tangent: Vec<f64> = sub(&at(s1), &at(s0)).iter().map(|x| x * c.orientation).collect();
                (at((i as f64 + 0.5) / m as f64), KVector::vector(&tangent))
            })
        }
    };
    PointedChain::from_terms(n, k, terms)
}

/// Oriented boundary cells.
pub fn cell_boundary(c: &Cell) -> Result<Vec<Cell>> {
    let k = c.grade();
    if k == 0 {
        return Err(Error::PointBoundary);
    }
    let o = c.orientation;
    match c.kind {
        CellKind::Segment | CellKind::Curve => {
            let last = c.vertices.len() - 1;
            Ok(vec![Cell::point(&c.vertices[last], o)?, Cell::point(&c.vertices[0], -o)?])
        }
        CellKind::Simplex => (0..=k)
            .map(|i| {
                let mut verts = c.vertices.clone();
                verts.remove(i);
                let sign = if i % 2 == 0 { o } else { -o };
                Cell::new(if k == 2 { CellKind::Segment } else { CellKind::Simplex }, verts, sign)
            })
            .collect(),
        CellKind::Box => {
            let edges = c.edges();
            let v0 = &c.vertices[0];
            let mut faces = Vec::with_capacity(2 * k);
            for i in 0..k {
                let others: Vec<Vec<f64>> =
                    edges.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, e)| e.clone()).collect();
                // with 1-based axis i + 1: the face at t = 0 carries (−1)^{i+1}
                let low_sign = if i % 2 == 0 { -o } else { o };
                for (origin, sign) in [(v0.clone(), low_sign), (add(v0, &edges[i]), -low_sign)] {
                    let mut verts = vec![origin.clone()];
                    verts.extend(others.iter().map(|e| add(&origin, e)));
                    let kind = if k == 2 { CellKind::Segment } else { CellKind::Box };
                    faces.push(Cell::new(kind, verts, sign)?);
                }
            }
            Ok(faces)
        }
    }
}

fn quantize(p: &[f64]) -> Vec<i64> {
    p.iter().map(|x| (x / VERTEX_QUANTUM).round() as i64).collect()
}

/// Net signed multiplicity of each geometric cell in `cells`, keyed by its
/// quantized corner set. Oppositely oriented copies cancel.
pub fn cancel(cells: &[Cell]) -> Result<BTreeMap<Vec<Vec<i64>>, i64>> {
    let mut net: BTreeMap<Vec<Vec<i64>>, i64> = BTreeMap::new();
    for c in cells {
        let mut key: Vec<Vec<i64>> = c.corners().iter().map(|p| quantize(p)).collect();
        key.sort();
        *net.entry(key).or_default() += c.sign_key()? as i64;
    }
    net.retain(|_, v| *v != 0);
    Ok(net)
}

/// Riemann chain of the oriented boundary, each face subdivided `m` times.
pub fn boundary_chain(c: &Cell, m: usize) -> Result<PointedChain> {
    let faces = cell_boundary(c)?;
    let mut acc = PointedChain::new(c.dim(), c.grade() - 1)?;
    for f in &faces {
        acc = acc.add(&riemann_chain(f, m)?)?;
    }
    Ok(acc)
}

/// Both sides of Stokes' theorem at resolution `m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StokesSample {
    pub m: usize,
    pub boundary: f64,
    pub interior: f64,
}

impl StokesSample {
    pub fn residual(&self) -> f64 {
        (self.boundary - self.interior).abs()
    }
}

pub fn stokes_sample(c: &Cell, w: &FormSpec, m: usize) -> Result<StokesSample> {
    let k = c.grade();
    if k == 0 {
        return Err(Error::PointBoundary);
    }
    if w.dim() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: w.dim() });
    }
    if w.grade() + 1 != k {
        return Err(Error::GradeMismatch { expected: k - 1, found: w.grade() });
    }
    let dw = w.exterior_derivative()?;
    let boundary = boundary_chain(c, m)?.pair(w)?;
    let interior = riemann_chain(c, m)?.pair(&dw)?;
    Ok(StokesSample { m, boundary, interior })
}

/// |∫_{∂A_m} ω − ∫_{A_m} dω| for the midpoint chains of `c` and its boundary.
pub fn stokes_residual(c: &Cell, w: &FormSpec, m: usize) -> Result<f64> {
    stokes_sample(c, w, m).map(|s| s.residual())
}

/// Least-squares slope of log y against log x. Any zero value means the
/// sequence has already converged and yields −∞.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument("slope fit needs at least two paired samples".into()));
    }
    if xs.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::InvalidArgument("slope fit needs positive abscissae".into()));
    }
    if ys.contains(&0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("slope fit needs distinct abscissae".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CauchyReport {
    pub r: usize,
    pub ms: Vec<usize>,
    /// Upper bound on ‖A_{2m} − A_m‖_{B^r} for each m.
    pub norms: Vec<f64>,
    pub slope: f64,
}

/// Upper bound on ‖riemann_chain(c, m2) − riemann_chain(c, m1)‖_{B^r}.
pub fn refinement_gap(c: &Cell, m1: usize, m2: usize, r: usize, exec: Exec) -> Result<f64> {
    let diff = riemann_chain_with(c, m2, exec)?.sub(&riemann_chain_with(c, m1, exec)?)?;
    Ok(upper::norm_upper_with(&diff, r, exec)?.value)
}

/// Decay exponent of ‖A_{2m} − A_m‖_{B^r} over `ms`.
pub fn cauchy_rate(c: &Cell, r: usize, ms: &[usize]) -> Result<CauchyReport> {
    cauchy_rate_with(c, r, ms, Exec::default())
}

pub fn cauchy_rate_with(c: &Cell, r: usize, ms: &[usize], exec: Exec) -> Result<CauchyReport> {
    if ms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("subdivision counts must increase".into()));
    }
    let norms = ms.iter().map(|&m| refinement_gap(c, m, 2 * m, r, exec)).collect::<Result<Vec<f64>>>()?;
    let xs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
    let slope = fit_loglog_slope(&xs, &norms)?;
    Ok(CauchyReport { r, ms: ms.to_vec(), norms, slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Phase;

    fn unit_segment() -> Cell {
        Cell::segment(&[0.0], &[1.0]).unwrap()
    }

    fn triangle() -> Cell {
        Cell::simplex(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn segment_halves() {
        let a = riemann_chain(&unit_segment(), 2).unwrap();
        let got: Vec<(f64, f64)> = a.terms().iter().map(|t| (t.point[0], t.vector.coeffs()[0])).collect();
        assert_eq!(got, vec![(0.25, 0.5), (0.75, 0.5)]);
        let mut dx = FormSpec::new(1, 1).unwrap();
        dx.push_poly(1.0, vec![0], vec![0]).unwrap();
        assert_eq!(a.pair(&dx).unwrap(), 1.0);
    }

    #[test]
    fn unit_square_single_cell() {
        let a = riemann_chain(&Cell::unit_cube(2).unwrap(), 1).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a.terms()[0].point, vec![0.5, 0.5]);
        assert_eq!(a.terms()[0].vector.coeffs(), &[1.0]);
    }

    #[test]
    fn mass_is_conserved() {
        let cells = [
            unit_segment(),
            triangle(),
            Cell::unit_cube(2).unwrap(),
            Cell::unit_cube(3).unwrap(),
            Cell::simplex(vec![vec![0.0; 3], vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 3.0]]).unwrap(),
            Cell::parallelepiped(&[1.0, 2.0, 3.0], &[vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 2.0]]).unwrap(),
        ];
        for c in &cells {
            for m in [1, 2, 3, 5, 8] {
                let a = riemann_chain(c, m).unwrap();
                assert_eq!(a.len(), m.pow(c.grade() as u32));
                assert!((a.total_mass() - c.volume()).abs() <= 1e-12 * c.volume().max(1.0), "{c:?} m={m}");
            }
        }
    }

    #[test]
    fn simplex_barycenters_average_to_centroid() {
        let t = Cell::simplex(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.5, 1.5]]).unwrap();
        let a = riemann_chain(&t, 4).unwrap();
        let mut centroid = [0.0; 2];
        for term in a.terms() {
            centroid[0] += term.point[0] / 16.0;
            centroid[1] += term.point[1] / 16.0;
        }
        assert!((centroid[0] - 2.5 / 3.0).abs() < 1e-12 && (centroid[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cells_rejected() {
        assert!(Cell::segment(&[1.0], &[1.0]).is_err());
        assert!(Cell::simplex(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).is_err());
        assert!(Cell::new(CellKind::Box, vec![vec![0.0]; 3], 1.0).is_err());
        assert!(Cell::new(CellKind::Segment, vec![vec![0.0], vec![1.0]], 2.0).is_err());
    }

    #[test]
    fn boundaries() {
        let b = cell_boundary(&Cell::segment(&[0.0], &[2.0]).unwrap()).unwrap();
        assert_eq!((b[0].vertices()[0][0], b[0].orientation()), (2.0, 1.0));
        assert_eq!((b[1].vertices()[0][0], b[1].orientation()), (0.0, -1.0));

        let t = triangle();
        let faces = cell_boundary(&t).unwrap();
        let v = t.vertices();
        assert_eq!(faces[0].vertices(), &[v[1].clone(), v[2].clone()]);
        assert_eq!(faces[1].vertices(), &[v[0].clone(), v[2].clone()]);
        assert_eq!(faces[2].vertices(), &[v[0].clone(), v[1].clone()]);
        assert_eq!(faces.iter().map(Cell::orientation).collect::<Vec<_>>(), vec![1.0, -1.0, 1.0]);

        assert!(matches!(cell_boundary(&Cell::point(&[0.0], 1.0).unwrap()), Err(Error::PointBoundary)));
    }

    #[test]
    fn square_boundary_is_counterclockwise() {
        // walking the oriented edges must follow the boundary anticlockwise
        let faces = cell_boundary(&Cell::unit_cube(2).unwrap()).unwrap();
        assert_eq!(faces.len(), 4);
        for f in &faces {
            let a = riemann_chain(f, 1).unwrap();
            let (p, t) = (&a.terms()[0].point, a.terms()[0].vector.coeffs());
            let outward = [p[0] - 0.5, p[1] - 0.5];
            assert!(outward[0] * t[1] - outward[1] * t[0] > 0.0, "{p:?} {t:?}");
        }
    }

    #[test]
    fn boundary_of_boundary_cancels() {
        let cells = [
            triangle(),
            Cell::unit_cube(2).unwrap(),
            Cell::unit_cube(3).unwrap(),
            Cell::simplex(vec![vec![0.0; 3], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap(),
            Cell::parallelepiped(&[0.1, 0.2, 0.3], &[vec![1.0, 0.5, 0.0], vec![0.0, 1.0, 0.5], vec![0.3, 0.0, 1.0]])
                .unwrap(),
        ];
        for c in &cells {
            let mut second = Vec::new();
            for f in cell_boundary(c).unwrap() {
                second.extend(cell_boundary(&f).unwrap());
            }
            assert!(cancel(&second).unwrap().is_empty(), "{c:?}");
            assert!(!cancel(&cell_boundary(c).unwrap()).unwrap().is_empty());
        }
    }

    #[test]
    fn greens_theorem_for_x_dy() {
        let mut w = FormSpec::new(2, 1).unwrap();
        w.push_poly(1.0, vec![1, 0], vec![1]).unwrap();
        let s = stokes_sample(&Cell::unit_cube(2).unwrap(), &w, 4).unwrap();
        assert!((s.boundary - 1.0).abs() < 1e-12);
        assert!((s.interior - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fundamental_theorem_on_segment() {
        let mut f = FormSpec::new(1, 0).unwrap();
        f.push_trig(1.0, vec![2.0], Phase::sin(), vec![]).unwrap();
        let c = Cell::segment(&[0.0], &[1.0]).unwrap();
        let s = stokes_sample(&c, &f, 8).unwrap();
        assert!((s.boundary - 2.0f64.sin()).abs() < 1e-15);
        let mut residuals = Vec::new();
        for m in [4, 8, 16, 32] {
            residuals.push(stokes_residual(&c, &f, m).unwrap());
        }
        let slope = fit_loglog_slope(&[4.0, 8.0, 16.0, 32.0], &residuals).unwrap();
        assert!(slope < -1.9, "{slope}");
    }

    #[test]
    fn stokes_grade_checked() {
        let w = FormSpec::new(2, 2).unwrap();
        assert!(matches!(stokes_residual(&Cell::unit_cube(2).unwrap(), &w, 2), Err(Error::GradeMismatch { .. })));
    }

    #[test]
    fn curve_chain_telescopes() {
        let c = Cell::curve_from_fn(|t| vec![t.cos(), t.sin()], 64).unwrap();
        let a = riemann_chain(&c, 8).unwrap();
        let mut sum = [0.0; 2];
        for t in a.terms() {
            sum[0] += t.vector.coeffs()[0];
            sum[1] += t.vector.coeffs()[1];
        }
        assert!((sum[0] - (1f64.cos() - 1.0)).abs() < 1e-12 && (sum[1] - 1f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn slope_fit() {
        let xs = [1.0, 2.0, 4.0];
        assert!((fit_loglog_slope(&xs, &[3.0, 1.5, 0.75]).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(fit_loglog_slope(&xs, &[1.0, 0.0, 0.0]).unwrap(), f64::NEG_INFINITY);
        assert!(fit_loglog_slope(&xs[..1], &[1.0]).is_err());
    }

    #[test]
    fn same_resolution_gap_is_zero() {
        assert_eq!(refinement_gap(&unit_segment(), 4, 4, 1, Exec::default()).unwrap(), 0.0);
    }

    #[test]
    fn segment_cauchy_rates() {
        let c = unit_segment();
        let r1 = cauchy_rate(&c, 1, &[4, 8, 16]).unwrap();
        assert!(r1.slope <= -0.9, "{r1:?}");
        let r0 = cauchy_rate(&c, 0, &[4, 8, 16]).unwrap();
        assert!(r0.slope.abs() < 0.1, "{r0:?}");
        assert!(r0.norms.iter().all(|v| (v - 2.0).abs() < 1e-12));
        let r2 = cauchy_rate(&c, 2, &[4, 8, 16]).unwrap();
        assert!(r2.slope <= -1.9, "{r2:?}");
    }
}
