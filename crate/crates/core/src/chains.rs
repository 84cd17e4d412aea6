//! Pointed chains, dipole chains and the pairing with forms.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::exterior::KVector;
use crate::forms::FormSpec;

/// Default cap on dipole order.
pub const DEFAULT_R_MAX: usize = 4;

/// Lexicographic total order on points.
pub fn cmp_points(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

fn normalize_point(p: &[f64]) -> Result<Vec<f64>> {
    if p.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite point {p:?}")));
    }
    // -0.0 and 0.0 must compare equal under total_cmp
    Ok(p.iter().map(|&x| if x == 0.0 { 0.0 } else { x }).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointedTerm {
    pub point: Vec<f64>,
    pub vector: KVector,
}

/// A finite formal sum Σ (p_i; α_i).
///
/// Terms are kept sorted by point with at most one term per point; terms at
/// identical points are merged and zero k-vectors dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct PointedChain {
    n: usize,
    k: usize,
    terms: Vec<PointedTerm>,
}

impl PointedChain {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::GradeOverflow { grade: k, dim: n });
        }
        Ok(PointedChain { n, k, terms: Vec::new() })
    }

    /// The single-term chain (p; α).
    pub fn point(p: &[f64], a: KVector) -> Result<Self> {
        let mut c = PointedChain::new(a.dim(), a.grade())?;
        c.push(p, a)?;
        Ok(c)
    }

    pub fn from_terms(n: usize, k: usize, terms: impl IntoIterator<Item = (Vec<f64>, KVector)>) -> Result<Self> {
        let mut c = PointedChain::new(n, k)?;
        for (p, a) in terms {
            c.push(&p, a)?;
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[PointedTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds (p; α), merging with an existing term at exactly the same point.
    pub fn push(&mut self, p: &[f64], a: KVector) -> Result<()> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.len() });
        }
        if a.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: a.dim() });
        }
        if a.grade() != self.k {
            return Err(Error::GradeMismatch { expected: self.k, found: a.grade() });
        }
        let point = normalize_point(p)?;
        match self.terms.binary_search_by(|t| cmp_points(&t.point, &point)) {
            Ok(i) => {
                let merged = &self.terms[i].vector + &a;
                if merged.is_zero() {
                    self.terms.remove(i);
                } else {
                    self.terms[i].vector = merged;
                }
            }
            Err(i) => {
                if !a.is_zero() {
                    self.terms.insert(i, PointedTerm { point, vector: a });
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &PointedChain) -> Result<PointedChain> {
        self.check_same(other)?;
        let mut out = self.clone();
        for t in &other.terms {
            out.push(&t.point, t.vector.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PointedChain) -> Result<PointedChain> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> PointedChain {
        let terms = if s == 0.0 {
            Vec::new()
        } else {
            self.terms
                .iter()
                .map(|t| PointedTerm { point: t.point.clone(), vector: t.vector.scale(s) })
                .collect()
        };
        PointedChain { n: self.n, k: self.k, terms }
    }

    fn check_same(&self, other: &PointedChain) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        if self.k != other.k {
            return Err(Error::GradeMismatch { expected: self.k, found: other.k });
        }
        Ok(())
    }

    /// Σ_i mass(α_i), the trivial upper bound for every B^r norm.
    pub fn total_mass(&self) -> f64 {
        let masses: Vec<f64> = self.terms.iter().map(|t| t.vector.mass().value).collect();
        exec::pairwise_sum(&masses)
    }

    pub fn pair(&self, w: &FormSpec) -> Result<f64> {
        self.pair_with(w, Exec::default())
    }

    /// Σ_i ω(p_i; α_i), summed pairwise in term order.
    pub fn pair_with(&self, w: &FormSpec, exec: Exec) -> Result<f64> {
        check_form(self.n, self.k, w)?;
        let values = exec::map_slice(exec, &self.terms, |t| w.derivative_unchecked(&[], &t.point, &t.vector));
        Ok(exec::pairwise_sum(&values))
    }

    /// Unnormalized difference Σ_i [(p_i + u; α_i) − (p_i; α_i)].
    pub fn delta(&self, u: &[f64]) -> Result<PointedChain> {
        if u.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: u.len() });
        }
        let mut out = PointedChain::new(self.n, self.k)?;
        for term in &self.terms {
            let shifted: Vec<f64> = term.point.iter().zip(u).map(|(p, ui)| p + ui).collect();
            out.push(&shifted, term.vector.clone())?;
            out.push(&term.point, term.vector.scale(-1.0))?;
        }
        Ok(out)
    }

    /// Σ_i [(p_i + t·v; α_i/t) − (p_i; α_i/t)].
    pub fn difference_chain(&self, v: &[f64], t: f64) -> Result<PointedChain> {
        if t == 0.0 {
            return Err(Error::ZeroScale);
        }
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: v.len() });
        }
        let mut out = PointedChain::new(self.n, self.k)?;
        for term in &self.terms {
            let shifted: Vec<f64> = term.point.iter().zip(v).map(|(p, vi)| p + t * vi).collect();
            let a = term.vector.scale(1.0 / t);
            out.push(&shifted, a.clone())?;
            out.push(&term.point, a.scale(-1.0))?;
        }
        Ok(out)
    }

    pub fn to_dipole(&self, r_max: usize) -> DipoleChain {
        DipoleChain {
            n: self.n,
            k: self.k,
            r_max,
            terms: self
                .terms
                .iter()
                .map(|t| DipoleTerm { point: t.point.clone(), vector: t.vector.clone(), dirs: Vec::new() })
                .collect(),
        }
    }
}

fn check_form(n: usize, k: usize, w: &FormSpec) -> Result<()> {
    if w.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w.dim() });
    }
    if w.grade() != k {
        return Err(Error::GradeMismatch { expected: k, found: w.grade() });
    }
    Ok(())
}

/// One order-j dipole term: P_{v_j} ⋯ P_{v_1} (p; α).
#[derive(Clone, Debug, PartialEq)]
pub struct DipoleTerm {
    pub point: Vec<f64>,
    pub vector: KVector,
    pub dirs: Vec<Vec<f64>>,
}

impl DipoleTerm {
    pub fn order(&self) -> usize {
        self.dirs.len()
    }
}

/// A finite sum of dipole terms of order at most `r_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct DipoleChain {
    n: usize,
    k: usize,
    r_max: usize,
    terms: Vec<DipoleTerm>,
}

impl DipoleChain {
    pub fn new(n: usize, k: usize, r_max: usize) -> Result<Self> {
        if k > n {
            return Err(Error::GradeOverflow { grade: k, dim: n });
        }
        Ok(DipoleChain { n, k, r_max, terms: Vec::new() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn terms(&self) -> &[DipoleTerm] {
        &self.terms
    }

    /// Highest order among the terms.
    pub fn order(&self) -> usize {
        self.terms.iter().map(DipoleTerm::order).max().unwrap_or(0)
    }

    pub fn push(&mut self, point: &[f64], vector: KVector, dirs: Vec<Vec<f64>>) -> Result<()> {
        if point.len() != self.n || vector.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: point.len().max(vector.dim()) });
        }
        if vector.grade() != self.k {
            return Err(Error::GradeMismatch { expected: self.k, found: vector.grade() });
        }
        if let Some(v) = dirs.iter().find(|v| v.len() != self.n) {
            return Err(Error::DimensionMismatch { expected: self.n, found: v.len() });
        }
        if dirs.len() > self.r_max {
            return Err(Error::OrderOverflow(self.r_max));
        }
        let point = normalize_point(point)?;
        self.terms.push(DipoleTerm { point, vector, dirs });
        Ok(())
    }

    pub fn scale(&self, s: f64) -> DipoleChain {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.vector = t.vector.scale(s);
        }
        out
    }

    /// Formal sum (concatenation).
    pub fn add(&self, other: &DipoleChain) -> Result<DipoleChain> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        if self.k != other.k {
            return Err(Error::GradeMismatch { expected: self.k, found: other.k });
        }
        let mut out = self.clone();
        out.r_max = self.r_max.max(other.r_max);
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    /// P_v applied termwise: appends v to every direction list.
    pub fn apply_pv(&self, v: &[f64]) -> Result<DipoleChain> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: v.len() });
        }
        if self.order() + 1 > self.r_max {
            return Err(Error::OrderOverflow(self.r_max));
        }
        let mut out = self.clone();
        for t in &mut out.terms {
            t.dirs.push(v.to_vec());
        }
        Ok(out)
    }

    pub fn pair(&self, w: &FormSpec) -> Result<f64> {
        self.pair_with(w, Exec::default())
    }

    /// Σ over terms of D_{v_1}…D_{v_j} ω(p; α).
    pub fn pair_with(&self, w: &FormSpec, exec: Exec) -> Result<f64> {
        check_form(self.n, self.k, w)?;
        let values = exec::map_slice(exec, &self.terms, |t| w.derivative_unchecked(&t.dirs, &t.point, &t.vector));
        Ok(exec::pairwise_sum(&values))
    }

    /// Lossless conversion when every term has order zero.
    pub fn to_pointed(&self) -> Option<PointedChain> {
        if self.terms.iter().any(|t| !t.dirs.is_empty()) {
            return None;
        }
        let mut out = PointedChain::new(self.n, self.k).ok()?;
        for t in &self.terms {
            out.push(&t.point, t.vector.clone()).ok()?;
        }
        Some(out)
    }
}

/// Either kind of chain can be paired with a form.
pub trait Pairing {
    fn pair_with(&self, w: &FormSpec, exec: Exec) -> Result<f64>;
}

impl Pairing for PointedChain {
    fn pair_with(&self, w: &FormSpec, exec: Exec) -> Result<f64> {
        PointedChain::pair_with(self, w, exec)
    }
}

impl Pairing for DipoleChain {
    fn pair_with(&self, w: &FormSpec, exec: Exec) -> Result<f64> {
        DipoleChain::pair_with(self, w, exec)
    }
}

/// ∫_A ω.
pub fn pair<C: Pairing>(a: &C, w: &FormSpec) -> Result<f64> {
    a.pair_with(w, Exec::default())
}

pub fn difference_chain(a: &PointedChain, v: &[f64], t: f64) -> Result<PointedChain> {
    a.difference_chain(v, t)
}

pub fn apply_pv(a: &DipoleChain, v: &[f64]) -> Result<DipoleChain> {
    a.apply_pv(v)
}
