//! Lower bounds for ‖A‖_{B^r} from explicit feasible forms.
//!
//! For a frequency ξ the best single atom `sin(ξ·x + φ)·w` with Euclidean
//! unit covector w pairs with A to `sqrt(λ_max(G))`, where G is the 2×2 Gram
//! matrix of `s = Σ α_i sin(ξ·p_i)` and `c = Σ α_i cos(ξ·p_i)`. Mixing
//! frequencies is a small LP: maximize `Σ v_m t_m` subject to
//! `Σ t_m |ξ_m|^j ≤ 1` for every order j ≤ r.

use crate::chains::PointedChain;
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::exterior::basis;
use crate::forms::{FormSpec, Phase, TrigKind};
use crate::lp::LinearProgram;

/// Relative shading applied to lower bounds so that rounding in the pairing
/// can never push a certified lower bound above the true norm.
pub const ROUNDING_SLACK: f64 = 1e-12;

/// Grid of candidate frequencies `s·u` (magnitude s, unit direction u).
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyBudget {
    pub magnitudes: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
}

impl FrequencyBudget {
    /// Magnitudes {0} ∪ {2^e : -3 ≤ e ≤ 5}; directions up to sign: the axes
    /// and pairwise diagonals, or 16 equally spaced angles in the plane.
    pub fn default_for(n: usize) -> Self {
        let mut magnitudes = vec![0.0];
        magnitudes.extend((-3..=5).map(|e| 2f64.powi(e)));
        let directions = match n {
            0 => Vec::new(),
            1 => vec![vec![1.0]],
            2 => (0..16)
                .map(|l| {
                    let theta = l as f64 * std::f64::consts::PI / 16.0;
                    vec![theta.cos(), theta.sin()]
                })
                .collect(),
            _ => {
                let mut dirs = Vec::new();
                for i in 0..n {
                    let mut u = vec![0.0; n];
                    u[i] = 1.0;
                    dirs.push(u);
                }
                let h = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..n {
                    for j in i + 1..n {
                        for sign in [1.0, -1.0] {
                            let mut u = vec![0.0; n];
                            u[i] = h;
                            u[j] = sign * h;
                            dirs.push(u);
                        }
                    }
                }
                dirs
            }
        };
        FrequencyBudget { magnitudes, directions }
    }

    /// Adds normalized extra directions, skipping zero vectors and duplicates.
    pub fn with_directions(mut self, extra: &[Vec<f64>]) -> Self {
        for v in extra {
            let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len == 0.0 || !len.is_finite() {
                continue;
            }
            let u: Vec<f64> = v.iter().map(|x| x / len).collect();
            let duplicate = self.directions.iter().any(|d| {
                let dot: f64 = d.iter().zip(&u).map(|(a, b)| a * b).sum();
                (dot.abs() - 1.0).abs() < 1e-12
            });
            if !duplicate {
                self.directions.push(u);
            }
        }
        self
    }

    /// The candidate frequency vectors. ξ = 0 appears once.
    pub fn frequencies(&self, n: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        if self.magnitudes.contains(&0.0) {
            out.push(vec![0.0; n]);
        }
        for &s in self.magnitudes.iter().filter(|&&m| m > 0.0) {
            for u in &self.directions {
                if u.len() == n {
                    out.push(u.iter().map(|x| s * x).collect());
                }
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty() || (self.directions.is_empty() && self.magnitudes.iter().all(|&m| m != 0.0))
    }
}

/// A certified lower bound: `value ≤ pair(A, certificate) / certificate_bound`.
#[derive(Clone, Debug)]
pub struct LowerBound {
    pub value: f64,
    pub certificate: FormSpec,
    pub certificate_bound: f64,
}

struct Candidate {
    frequency: Vec<f64>,
    covector: Vec<f64>,
    offset: f64,
    value: f64,
}

fn best_atom(a: &PointedChain, frequency: &[f64]) -> Candidate {
    let dim = a.terms().first().map_or(0, |t| t.vector.coeffs().len());
    let mut s = vec![0.0; dim];
    let mut c = vec![0.0; dim];
    for t in a.terms() {
        let phase: f64 = frequency.iter().zip(&t.point).map(|(x, y)| x * y).sum();
        let (sn, cs) = phase.sin_cos();
        for (i, &alpha) in t.vector.coeffs().iter().enumerate() {
            s[i] += alpha * sn;
            c[i] += alpha * cs;
        }
    }
    let ss: f64 = s.iter().map(|x| x * x).sum();
    let cc: f64 = c.iter().map(|x| x * x).sum();
    let sc: f64 = s.iter().zip(&c).map(|(x, y)| x * y).sum();
    let half_gap = (((ss - cc) / 2.0).powi(2) + sc * sc).sqrt();
    let lambda = (ss + cc) / 2.0 + half_gap;
    let (ea, eb) = if sc != 0.0 {
        (lambda - cc, sc)
    } else if ss >= cc {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    let mut w: Vec<f64> = s.iter().zip(&c).map(|(x, y)| ea * x + eb * y).collect();
    let len = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len == 0.0 || !len.is_finite() {
        return Candidate { frequency: frequency.to_vec(), covector: w, offset: 0.0, value: 0.0 };
    }
    w.iter_mut().for_each(|x| *x /= len);
    let big_s: f64 = w.iter().zip(&s).map(|(x, y)| x * y).sum();
    let big_c: f64 = w.iter().zip(&c).map(|(x, y)| x * y).sum();
    // Σ sin(ξ·p + φ) w(α) = cos φ · S + sin φ · C
    let offset = big_c.atan2(big_s);
    Candidate { frequency: frequency.to_vec(), covector: w, offset, value: big_s.hypot(big_c) }
}

fn build_form(n: usize, k: usize, atoms: &[(f64, &Candidate)]) -> Result<FormSpec> {
    let sets = basis(n, k);
    let mut form = FormSpec::new(n, k)?;
    for (amp, cand) in atoms {
        for (set, &wi) in sets.iter().zip(&cand.covector) {
            if wi != 0.0 {
                form.push_trig(
                    amp * wi,
                    cand.frequency.clone(),
                    Phase { kind: TrigKind::Sin, offset: cand.offset },
                    set.clone(),
                )?;
            }
        }
    }
    Ok(form)
}

/// Certified lower bound for ‖A‖_{B^r} over the trig family spanned by `budget`.
pub fn norm_lower(a: &PointedChain, r: usize, budget: &FrequencyBudget) -> Result<LowerBound> {
    norm_lower_with(a, r, budget, Exec::default())
}

pub fn norm_lower_with(a: &PointedChain, r: usize, budget: &FrequencyBudget, exec: Exec) -> Result<LowerBound> {
    let (n, k) = (a.dim(), a.grade());
    let frequencies = budget.frequencies(n);
    if budget.is_empty() || frequencies.is_empty() {
        return Err(Error::EmptyBudget);
    }
    let candidates = exec::map_slice(exec, &frequencies, |xi| best_atom(a, xi));
    let usable: Vec<&Candidate> = candidates.iter().filter(|c| c.value > 0.0).collect();

    let chosen: Vec<(f64, &Candidate)> = if usable.is_empty() {
        Vec::new()
    } else {
        let mut lp = LinearProgram::new(usable.iter().map(|c| c.value).collect());
        for j in 0..=r {
            let row = usable
                .iter()
                .enumerate()
                .map(|(m, c)| {
                    let len = c.frequency.iter().map(|x| x * x).sum::<f64>().sqrt();
                    (m, len.powi(j as i32))
                })
                .filter(|(_, cost)| *cost != 0.0)
                .collect();
            lp.add_le(row, 1.0)?;
        }
        let sol = lp.maximize()?;
        sol.x.iter().zip(&usable).filter(|(t, _)| **t > 0.0).map(|(t, c)| (*t, *c)).collect()
    };

    if chosen.is_empty() {
        // zero functional: any normalized form certifies the bound 0
        let mut form = FormSpec::new(n, k)?;
        form.push_trig(1.0, vec![0.0; n], Phase::cos(), (0..k).collect())?;
        let bound = form.cr_bound(r)?;
        return Ok(LowerBound { value: 0.0, certificate: form, certificate_bound: bound });
    }
    let form = build_form(n, k, &chosen)?;
    let bound = form.cr_bound(r)?;
    let paired = a.pair_with(&form, exec)?;
    let value = (paired / bound * (1.0 - ROUNDING_SLACK)).max(0.0);
    Ok(LowerBound { value, certificate: form, certificate_bound: bound })
}
