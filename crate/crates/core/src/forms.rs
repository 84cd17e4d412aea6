//! Differential k-forms on R^n built from analytic atoms.
//!
//! A trig atom is `c · trig(ξ·x + φ) · dx_I`; a polynomial atom is
//! `c · x^e · dx_I`. Both have exact iterated directional derivatives. Only
//! trig atoms are globally bounded, so only they admit a certified C^r bound.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exterior::{index_rank, merge_sets, KVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrigKind {
    Sin,
    Cos,
}

/// `trig(x + offset)` for trig ∈ {sin, cos}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phase {
    pub kind: TrigKind,
    pub offset: f64,
}

impl Phase {
    pub fn sin() -> Self {
        Phase { kind: TrigKind::Sin, offset: 0.0 }
    }

    pub fn cos() -> Self {
        Phase { kind: TrigKind::Cos, offset: 0.0 }
    }

    /// j-th derivative of `x ↦ trig(x + offset)` at `x`.
    ///
    /// Cycles sin → cos → -sin → -cos so that e.g. the first derivative of
    /// sin at 0 is exactly `cos(0) = 1`.
    pub fn derivative_at(&self, x: f64, order: usize) -> f64 {
        let start = match self.kind {
            TrigKind::Sin => 0,
            TrigKind::Cos => 1,
        };
        let arg = x + self.offset;
        match (start + order) % 4 {
            0 => arg.sin(),
            1 => arg.cos(),
            2 => -arg.sin(),
            _ => -arg.cos(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Atom {
    Trig { amplitude: f64, frequency: Vec<f64>, phase: Phase, index: Vec<usize> },
    Poly { coeff: f64, exponents: Vec<u32>, index: Vec<usize> },
}

impl Atom {
    pub fn index(&self) -> &[usize] {
        match self {
            Atom::Trig { index, .. } | Atom::Poly { index, .. } => index,
        }
    }

    fn scaled(&self, s: f64) -> Atom {
        match self {
            Atom::Trig { amplitude, frequency, phase, index } => Atom::Trig {
                amplitude: amplitude * s,
                frequency: frequency.clone(),
                phase: *phase,
                index: index.clone(),
            },
            Atom::Poly { coeff, exponents, index } => {
                Atom::Poly { coeff: coeff * s, exponents: exponents.clone(), index: index.clone() }
            }
        }
    }
}

/// A differential k-form on R^n given as a finite sum of atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct FormSpec {
    n: usize,
    k: usize,
    atoms: Vec<Atom>,
    ranks: Vec<usize>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Iterated directional derivative of `coeff · x^exponents` at `p`.
fn poly_derivative(coeff: f64, exponents: &[u32], dirs: &[Vec<f64>], p: &[f64]) -> f64 {
    match dirs.split_first() {
        None => coeff * exponents.iter().zip(p).map(|(&e, &x)| x.powi(e as i32)).product::<f64>(),
        Some((v, rest)) => {
            let mut total = 0.0;
            for (i, &e) in exponents.iter().enumerate() {
                if e == 0 || v[i] == 0.0 {
                    continue;
                }
                let mut lowered = exponents.to_vec();
                lowered[i] -= 1;
                total += poly_derivative(coeff * v[i] * e as f64, &lowered, rest, p);
            }
            total
        }
    }
}

impl FormSpec {
    /// The zero k-form on R^n.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::GradeOverflow { grade: k, dim: n });
        }
        Ok(FormSpec { n, k, atoms: Vec::new(), ranks: Vec::new() })
    }

    pub fn from_atoms(n: usize, k: usize, atoms: Vec<Atom>) -> Result<Self> {
        let mut form = FormSpec::new(n, k)?;
        for atom in atoms {
            form.push(atom)?;
        }
        Ok(form)
    }

    pub fn push(&mut self, atom: Atom) -> Result<()> {
        let index = atom.index();
        if index.len() != self.k {
            return Err(Error::GradeMismatch { expected: self.k, found: index.len() });
        }
        let rank = index_rank(self.n, index)?;
        let len = match &atom {
            Atom::Trig { frequency, .. } => frequency.len(),
            Atom::Poly { exponents, .. } => exponents.len(),
        };
        if len != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: len });
        }
        self.atoms.push(atom);
        self.ranks.push(rank);
        Ok(())
    }

    pub fn push_trig(&mut self, amplitude: f64, frequency: Vec<f64>, phase: Phase, index: Vec<usize>) -> Result<()> {
        self.push(Atom::Trig { amplitude, frequency, phase, index })
    }

    pub fn push_poly(&mut self, coeff: f64, exponents: Vec<u32>, index: Vec<usize>) -> Result<()> {
        self.push(Atom::Poly { coeff, exponents, index })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// True when every atom is a trig atom.
    pub fn is_certifiable(&self) -> bool {
        self.atoms.iter().all(|a| matches!(a, Atom::Trig { .. }))
    }

    pub fn scale(&self, s: f64) -> FormSpec {
        FormSpec {
            n: self.n,
            k: self.k,
            atoms: self.atoms.iter().map(|a| a.scaled(s)).collect(),
            ranks: self.ranks.clone(),
        }
    }

    /// Formal sum (concatenation of atom lists).
    pub fn sum(&self, other: &FormSpec) -> Result<FormSpec> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        if self.k != other.k {
            return Err(Error::GradeMismatch { expected: self.k, found: other.k });
        }
        let mut out = self.clone();
        out.atoms.extend(other.atoms.iter().cloned());
        out.ranks.extend(other.ranks.iter().copied());
        Ok(out)
    }

    fn check_args(&self, dirs: &[Vec<f64>], p: &[f64], a: &KVector) -> Result<()> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.len() });
        }
        if let Some(v) = dirs.iter().find(|v| v.len() != self.n) {
            return Err(Error::DimensionMismatch { expected: self.n, found: v.len() });
        }
        if a.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: a.dim() });
        }
        if a.grade() != self.k {
            return Err(Error::GradeMismatch { expected: self.k, found: a.grade() });
        }
        Ok(())
    }

    /// ω(p; α).
    pub fn eval(&self, p: &[f64], a: &KVector) -> Result<f64> {
        self.derivative(&[], p, a)
    }

    /// Exact iterated directional derivative D_{v_1}…D_{v_j} of x ↦ ω(x; α) at p.
    pub fn derivative(&self, dirs: &[Vec<f64>], p: &[f64], a: &KVector) -> Result<f64> {
        self.check_args(dirs, p, a)?;
        Ok(self.derivative_unchecked(dirs, p, a))
    }

    pub(crate) fn derivative_unchecked(&self, dirs: &[Vec<f64>], p: &[f64], a: &KVector) -> f64 {
        let coeffs = a.coeffs();
        let mut total = 0.0;
        for (atom, &rank) in self.atoms.iter().zip(&self.ranks) {
            let weight = coeffs[rank];
            if weight == 0.0 {
                continue;
            }
            let value = match atom {
                Atom::Trig { amplitude, frequency, phase, .. } => {
                    let chain: f64 = dirs.iter().map(|v| dot(frequency, v)).product();
                    amplitude * chain * phase.derivative_at(dot(frequency, p), dirs.len())
                }
                Atom::Poly { coeff, exponents, .. } => poly_derivative(*coeff, exponents, dirs, p),
            };
            total += value * weight;
        }
        total
    }

    /// The Lie derivative L_v ω along a constant field v, as a new form.
    pub fn lie_derivative(&self, v: &[f64]) -> Result<FormSpec> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: v.len() });
        }
        let mut out = FormSpec::new(self.n, self.k)?;
        for atom in &self.atoms {
            match atom {
                Atom::Trig { amplitude, frequency, phase, index } => {
                    let rate = dot(frequency, v);
                    let (kind, sign) = match phase.kind {
                        TrigKind::Sin => (TrigKind::Cos, 1.0),
                        TrigKind::Cos => (TrigKind::Sin, -1.0),
                    };
                    out.push_trig(
                        sign * amplitude * rate,
                        frequency.clone(),
                        Phase { kind, offset: phase.offset },
                        index.clone(),
                    )?;
                }
                Atom::Poly { coeff, exponents, index } => {
                    for i in 0..self.n {
                        if exponents[i] == 0 || v[i] == 0.0 {
                            continue;
                        }
                        let mut lowered = exponents.clone();
                        lowered[i] -= 1;
                        out.push_poly(coeff * v[i] * exponents[i] as f64, lowered, index.clone())?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative dω = Σ_i ∂_i f dx_i ∧ dx_I, grade k+1.
    pub fn exterior_derivative(&self) -> Result<FormSpec> {
        let mut out = FormSpec::new(self.n, self.k + 1)?;
        for atom in &self.atoms {
            for i in 0..self.n {
                let Some((merged, sign)) = merge_sets(&[i], atom.index()) else {
                    continue;
                };
                match atom {
                    Atom::Trig { amplitude, frequency, phase, .. } => {
                        if frequency[i] == 0.0 {
                            continue;
                        }
                        let (kind, flip) = match phase.kind {
                            TrigKind::Sin => (TrigKind::Cos, 1.0),
                            TrigKind::Cos => (TrigKind::Sin, -1.0),
                        };
                        out.push_trig(
                            sign * flip * amplitude * frequency[i],
                            frequency.clone(),
                            Phase { kind, offset: phase.offset },
                            merged,
                        )?;
                    }
                    Atom::Poly { coeff, exponents, .. } => {
                        if exponents[i] == 0 {
                            continue;
                        }
                        let mut lowered = exponents.clone();
                        lowered[i] -= 1;
                        out.push_poly(sign * coeff * exponents[i] as f64, lowered, merged)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Certified bound on ‖ω‖_{C^r}: the max over orders j ≤ r of the sup of
    /// |D_{u_1}…D_{u_j} ω(p; α)| over points, unit directions and unit-mass α.
    ///
    /// Atoms sharing frequency and phase form one term `trig(ξ·x+φ)·w`; the
    /// comass of w is at most its Euclidean norm and each derivative
    /// contributes a factor |ξ·u| ≤ |ξ|, giving
    /// `max_j Σ_groups |ξ|^j · ‖w‖₂`. This never exceeds the per-atom
    /// triangle bound `max_j Σ_m |c_m| |ξ_m|^j`.
    pub fn cr_bound(&self, r: usize) -> Result<f64> {
        // (frequency bits, kind, offset bits) -> (|ξ|, covector coefficients by rank)
        let mut groups: BTreeMap<(Vec<u64>, u8, u64), (f64, BTreeMap<usize, f64>)> = BTreeMap::new();
        for (atom, &rank) in self.atoms.iter().zip(&self.ranks) {
            let Atom::Trig { amplitude, frequency, phase, .. } = atom else {
                return Err(Error::UncertifiableFamily);
            };
            let key = (
                frequency.iter().map(|x| canonical_bits(*x)).collect(),
                phase.kind as u8,
                canonical_bits(phase.offset),
            );
            let entry = groups.entry(key).or_insert_with(|| (norm(frequency), BTreeMap::new()));
            *entry.1.entry(rank).or_insert(0.0) += amplitude;
        }
        let weights: Vec<(f64, f64)> = groups
            .values()
            .map(|(freq, cov)| (*freq, cov.values().map(|c| c * c).sum::<f64>().sqrt()))
            .collect();
        let bound = (0..=r)
            .map(|j| weights.iter().map(|(freq, w)| freq.powi(j as i32) * w).sum::<f64>())
            .fold(0.0, f64::max);
        Ok(bound)
    }
}

fn canonical_bits(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

/// Free function form of [`FormSpec::derivative`].
pub fn derivative(w: &FormSpec, dirs: &[Vec<f64>], p: &[f64], a: &KVector) -> Result<f64> {
    w.derivative(dirs, p, a)
}

/// Free function form of [`FormSpec::cr_bound`].
pub fn cr_bound(w: &FormSpec, r: usize) -> Result<f64> {
    w.cr_bound(r)
}
