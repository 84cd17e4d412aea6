//! The natural norm ‖A‖_♮ as the limit of the non-increasing B^r norms.

use crate::chains::PointedChain;
use crate::error::{Error, Result};
use crate::exec::Exec;

use super::{estimate_orders, FrequencyBudget, NormEstimate};

#[derive(Clone, Debug)]
pub struct NaturalNormEstimate {
    /// One sandwich per r = 0..=r_max.
    pub estimates: Vec<NormEstimate>,
    /// Upper bound at the plateau order (or at r_max when none was reached).
    pub plateau: f64,
    /// First r whose upper bound changed by less than `tol` relative to r − 1.
    pub plateau_order: Option<usize>,
    /// Whether upper(r + 1) ≤ upper(r) held for every r.
    pub monotone: bool,
}

impl NaturalNormEstimate {
    pub fn uppers(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.upper).collect()
    }

    pub fn lowers(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.lower).collect()
    }
}

/// Relative change |b − a| / a, with 0/0 read as 0.
pub fn relative_change(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        if b == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (b - a).abs() / a.abs()
    }
}

pub fn natural_norm(a: &PointedChain, r_max: usize, tol: f64, budget: &FrequencyBudget) -> Result<NaturalNormEstimate> {
    natural_norm_with(a, r_max, tol, budget, Exec::default())
}

pub fn natural_norm_with(
    a: &PointedChain,
    r_max: usize,
    tol: f64,
    budget: &FrequencyBudget,
    exec: Exec,
) -> Result<NaturalNormEstimate> {
    if r_max < 1 {
        return Err(Error::InvalidArgument("natural norm needs r_max ≥ 1".into()));
    }
    let estimates = estimate_orders(a, r_max, budget, exec)?;
    let uppers: Vec<f64> = estimates.iter().map(|e| e.upper).collect();
    let monotone = uppers.windows(2).all(|w| w[1] <= w[0]);
    let plateau_order = (1..uppers.len()).find(|&r| relative_change(uppers[r - 1], uppers[r]) < tol);
    let plateau = uppers[plateau_order.unwrap_or(r_max)];
    Ok(NaturalNormEstimate { estimates, plateau, plateau_order, monotone })
}
