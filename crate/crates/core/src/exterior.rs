//! Exterior algebra of R^n in the canonical basis.
//!
//! Index sets are strictly increasing, 0-based, and ordered lexicographically;
//! a grade-k element of R^n stores exactly C(n,k) coefficients in that order.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Binomial coefficient C(n, k), zero when k > n.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All strictly increasing k-subsets of `0..n` in lexicographic order.
pub fn basis(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let need = k - current.len();
        for i in start..=(n - need) {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    if k <= n {
        rec(0, n, k, &mut current, &mut out);
    }
    out
}

/// Lexicographic rank of a strictly increasing index set among the k-subsets of `0..n`.
pub fn index_rank(n: usize, set: &[usize]) -> Result<usize> {
    check_index_set(n, set)?;
    let k = set.len();
    let mut rank = 0;
    let mut prev = 0;
    for (pos, &idx) in set.iter().enumerate() {
        // count subsets that agree so far but take a smaller element here
        for skipped in prev..idx {
            rank += binomial(n - skipped - 1, k - pos - 1);
        }
        prev = idx + 1;
    }
    Ok(rank)
}

fn check_index_set(n: usize, set: &[usize]) -> Result<()> {
    let increasing = set.windows(2).all(|w| w[0] < w[1]);
    if !increasing || set.iter().any(|&i| i >= n) {
        return Err(Error::InvalidIndexSet(set.to_vec()));
    }
    Ok(())
}

/// Sorted union of two disjoint index sets together with the sign of the
/// shuffle permutation, or `None` when the sets overlap.
pub fn merge_sets(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut inversions = 0usize;
    for &x in a {
        for &y in b {
            if x == y {
                return None;
            }
            if x > y {
                inversions += 1;
            }
        }
    }
    let mut merged: Vec<usize> = a.iter().chain(b).copied().collect();
    merged.sort_unstable();
    let sign = if inversions.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((merged, sign))
}

fn check_grade(n: usize, k: usize) -> Result<()> {
    if k > n {
        Err(Error::GradeOverflow { grade: k, dim: n })
    } else {
        Ok(())
    }
}

/// An element of the k-th exterior power of R^n.
#[derive(Clone, Debug, PartialEq)]
pub struct KVector {
    n: usize,
    k: usize,
    coeffs: Vec<f64>,
}

/// Mass of a k-vector. `exact` is false when only an upper bound is known.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mass {
    pub value: f64,
    pub exact: bool,
}

impl KVector {
    pub fn new(n: usize, k: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_grade(n, k)?;
        let expected = binomial(n, k);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: coeffs.len() });
        }
        Ok(KVector { n, k, coeffs })
    }

    pub fn zero(n: usize, k: usize) -> Result<Self> {
        check_grade(n, k)?;
        Ok(KVector { n, k, coeffs: vec![0.0; binomial(n, k)] })
    }

    pub fn scalar(n: usize, value: f64) -> Self {
        KVector { n, k: 0, coeffs: vec![value] }
    }

    /// A grade-1 vector with the given coordinates.
    pub fn vector(coords: &[f64]) -> Self {
        KVector { n: coords.len(), k: 1, coeffs: coords.to_vec() }
    }

    /// The basis element e_I for a strictly increasing 0-based index set.
    pub fn basis_element(n: usize, set: &[usize]) -> Result<Self> {
        check_grade(n, set.len())?;
        let mut v = KVector::zero(n, set.len())?;
        let rank = index_rank(n, set)?;
        v.coeffs[rank] = 1.0;
        Ok(v)
    }

    pub fn from_pairs(n: usize, k: usize, pairs: &[(Vec<usize>, f64)]) -> Result<Self> {
        let mut v = KVector::zero(n, k)?;
        for (set, c) in pairs {
            if set.len() != k {
                return Err(Error::GradeMismatch { expected: k, found: set.len() });
            }
            v.coeffs[index_rank(n, set)?] += c;
        }
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Nonzero (index set, coefficient) pairs in lexicographic order.
    pub fn terms(&self) -> Vec<(Vec<usize>, f64)> {
        basis(self.n, self.k)
            .into_iter()
            .zip(self.coeffs.iter().copied())
            .filter(|(_, c)| *c != 0.0)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        KVector { n: self.n, k: self.k, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Euclidean inner product of coefficient vectors.
    pub fn dot(&self, other: &KVector) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn same_shape(&self, other: &KVector) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        if self.k != other.k {
            return Err(Error::GradeMismatch { expected: self.k, found: other.k });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &KVector) -> Result<Self> {
        self.same_shape(other)?;
        Ok(KVector {
            n: self.n,
            k: self.k,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    /// Exterior product. Fails with [`Error::GradeOverflow`] when j + k > n.
    pub fn wedge(&self, other: &KVector) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let grade = self.k + other.k;
        check_grade(self.n, grade)?;
        let mut out = KVector::zero(self.n, grade)?;
        let left = basis(self.n, self.k);
        let right = basis(other.n, other.k);
        for (a_set, &a) in left.iter().zip(&self.coeffs) {
            if a == 0.0 {
                continue;
            }
            for (b_set, &b) in right.iter().zip(&other.coeffs) {
                if b == 0.0 {
                    continue;
                }
                if let Some((merged, sign)) = merge_sets(a_set, b_set) {
                    out.coeffs[index_rank(self.n, &merged)?] += sign * a * b;
                }
            }
        }
        Ok(out)
    }

    /// Whether this k-vector is a wedge of k vectors, up to relative tolerance `tol`.
    ///
    /// Grades 0, 1, n-1 and n are always simple. Otherwise the kernel of
    /// v -> v ∧ a must be k-dimensional.
    pub fn is_simple(&self, tol: f64) -> bool {
        let (n, k) = (self.n, self.k);
        if k <= 1 || k + 1 >= n || self.is_zero() {
            return true;
        }
        let rows = binomial(n, k + 1);
        let mut m = DMatrix::<f64>::zeros(rows, n);
        for i in 0..n {
            let e = KVector::basis_element(n, &[i]).expect("valid basis index");
            let col = e.wedge(self).expect("grade checked above");
            for (r, c) in col.coeffs.iter().enumerate() {
                m[(r, i)] = *c;
            }
        }
        let sv = m.singular_values();
        let top = sv.iter().cloned().fold(0.0_f64, f64::max);
        let rank = sv.iter().filter(|&&s| s > tol * top).count();
        rank == n - k
    }

    /// Greedy decomposition into simple k-vectors.
    ///
    /// Terms sharing a common (k-1)-subset J sum to e_J ∧ w, which is simple,
    /// so groups are peeled off in order of the largest l1 - l2 saving.
    pub fn simple_decomposition(&self) -> Vec<KVector> {
        if self.is_simple(1e-10) {
            return if self.is_zero() { Vec::new() } else { vec![self.clone()] };
        }
        let mut remaining = self.terms();
        let mut pieces = Vec::new();
        while !remaining.is_empty() {
            let mut faces: Vec<Vec<usize>> = remaining
                .iter()
                .flat_map(|(set, _)| {
                    (0..set.len()).map(move |drop| {
                        set.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, &x)| x).collect()
                    })
                })
                .collect();
            faces.sort();
            faces.dedup();
            let mut best: Option<(f64, Vec<usize>)> = None;
            for face in faces {
                let group: Vec<f64> = remaining
                    .iter()
                    .filter(|(set, _)| face.iter().all(|j| set.contains(j)))
                    .map(|(_, c)| *c)
                    .collect();
                let l1: f64 = group.iter().map(|c| c.abs()).sum();
                let l2 = group.iter().map(|c| c * c).sum::<f64>().sqrt();
                let saving = l1 - l2;
                if best.as_ref().is_none_or(|(s, _)| saving > *s) {
                    best = Some((saving, face));
                }
            }
            let (saving, face) = best.expect("remaining is nonempty");
            if saving <= 0.0 {
                for (set, c) in remaining.drain(..) {
                    pieces.push(KVector::from_pairs(self.n, self.k, &[(set, c)]).expect("valid set"));
                }
                break;
            }
            let (group, rest): (Vec<_>, Vec<_>) =
                remaining.into_iter().partition(|(set, _)| face.iter().all(|j| set.contains(j)));
            pieces.push(KVector::from_pairs(self.n, self.k, &group).expect("valid sets"));
            remaining = rest;
        }
        pieces
    }

    /// Mass norm. Exact for simple k-vectors (where it equals the Euclidean
    /// norm of the coefficients, i.e. the square root of the Gram determinant
    /// of any factorization); otherwise an upper bound from
    /// [`simple_decomposition`](Self::simple_decomposition).
    pub fn mass(&self) -> Mass {
        if self.is_simple(1e-10) {
            return Mass { value: self.euclidean_norm(), exact: true };
        }
        let value = self.simple_decomposition().iter().map(KVector::euclidean_norm).sum();
        Mass { value, exact: false }
    }
}

impl fmt::Display for KVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (set, c)) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let name: Vec<String> = set.iter().map(|j| format!("e{}", j + 1)).collect();
            if name.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}·{}", name.join("∧"))?;
            }
        }
        Ok(())
    }
}

impl Add for &KVector {
    type Output = KVector;
    fn add(self, rhs: &KVector) -> KVector {
        self.try_add(rhs).expect("k-vector shapes must match")
    }
}

impl Sub for &KVector {
    type Output = KVector;
    fn sub(self, rhs: &KVector) -> KVector {
        self.try_add(&rhs.scale(-1.0)).expect("k-vector shapes must match")
    }
}

impl Neg for &KVector {
    type Output = KVector;
    fn neg(self) -> KVector {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &KVector {
    type Output = KVector;
    fn mul(self, rhs: f64) -> KVector {
        self.scale(rhs)
    }
}

/// A constant k-covector, coefficients over the dual basis dx_I.
#[derive(Clone, Debug, PartialEq)]
pub struct KCovector {
    n: usize,
    k: usize,
    coeffs: Vec<f64>,
}

impl KCovector {
    pub fn new(n: usize, k: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_grade(n, k)?;
        let expected = binomial(n, k);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: coeffs.len() });
        }
        Ok(KCovector { n, k, coeffs })
    }

    /// dx_I for a strictly increasing 0-based index set.
    pub fn basis_element(n: usize, set: &[usize]) -> Result<Self> {
        let v = KVector::basis_element(n, set)?;
        Ok(KCovector { n, k: v.k, coeffs: v.coeffs })
    }

    pub fn from_pairs(n: usize, k: usize, pairs: &[(Vec<usize>, f64)]) -> Result<Self> {
        let v = KVector::from_pairs(n, k, pairs)?;
        Ok(KCovector { n, k, coeffs: v.coeffs })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn terms(&self) -> Vec<(Vec<usize>, f64)> {
        basis(self.n, self.k)
            .into_iter()
            .zip(self.coeffs.iter().copied())
            .filter(|(_, c)| *c != 0.0)
            .collect()
    }

    /// Canonical pairing Σ_I w_I a_I.
    pub fn apply(&self, a: &KVector) -> Result<f64> {
        if self.n != a.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: a.n });
        }
        if self.k != a.k {
            return Err(Error::GradeMismatch { expected: self.k, found: a.k });
        }
        Ok(self.coeffs.iter().zip(&a.coeffs).map(|(w, x)| w * x).sum())
    }

    /// Upper bound on the comass: the Euclidean norm, exact for grades 0, 1, n-1, n.
    pub fn comass_bound(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Exterior product of covectors.
    pub fn wedge(&self, other: &KCovector) -> Result<Self> {
        let a = KVector { n: self.n, k: self.k, coeffs: self.coeffs.clone() };
        let b = KVector { n: other.n, k: other.k, coeffs: other.coeffs.clone() };
        let w = a.wedge(&b)?;
        Ok(KCovector { n: w.n, k: w.k, coeffs: w.coeffs })
    }
}

/// Free function form of [`KCovector::apply`].
pub fn covector_apply(w: &KCovector, a: &KVector) -> Result<f64> {
    w.apply(a)
}
