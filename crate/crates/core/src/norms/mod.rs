//! Two-sided estimation of the B^r norms and the natural norm.
//!
//! ‖A‖_{B^r} is the supremum of ∫_A ω over forms with ‖ω‖_{C^r} ≤ 1. It is
//! never computed directly: [`lower`] exhibits feasible forms, [`upper`]
//! exhibits difference-cell decompositions, and each side carries a
//! certificate that can be re-checked independently.

pub mod lower;
pub mod natural;
pub mod oracle;
pub mod upper;

pub use lower::{norm_lower, FrequencyBudget, LowerBound};
pub use natural::{natural_norm, NaturalNormEstimate};
pub use oracle::{norm_oracle_grid, GridSpec, OracleReport};
pub use upper::{norm_upper, DifferenceCell, UpperBound};

use crate::chains::PointedChain;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::forms::FormSpec;

/// Extra frequency directions taken from the upper certificate.
const CERTIFICATE_DIRECTIONS: usize = 16;
/// Relative tolerance for certificate re-checks.
pub const CERTIFICATE_TOL: f64 = 1e-9;

/// A certified sandwich `lower ≤ ‖A‖_{B^r} ≤ upper`.
#[derive(Clone, Debug)]
pub struct NormEstimate {
    pub r: usize,
    pub lower: f64,
    pub upper: f64,
    pub lower_certificate: FormSpec,
    pub lower_certificate_bound: f64,
    pub upper_certificate: Vec<DifferenceCell>,
}

impl NormEstimate {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    /// Re-pairs the lower certificate, re-expands the upper certificate and
    /// checks `0 ≤ lower ≤ upper`.
    pub fn validate(&self, a: &PointedChain) -> Result<()> {
        let fail = |msg: String| Err(Error::CertificateInvalid(msg));
        if !(0.0 <= self.lower && self.lower <= self.upper) {
            return fail(format!("r = {}: sandwich violated, lower {} > upper {}", self.r, self.lower, self.upper));
        }
        let bound = self.lower_certificate.cr_bound(self.r)?;
        if (bound - self.lower_certificate_bound).abs() > CERTIFICATE_TOL * bound.max(1.0) {
            return fail(format!("r = {}: lower certificate bound changed", self.r));
        }
        let paired = a.pair(&self.lower_certificate)?;
        let ratio = if bound > 0.0 { paired / bound } else { 0.0 };
        if (ratio - self.lower).abs() > CERTIFICATE_TOL * ratio.abs().max(1e-300) && self.lower > 0.0 {
            return fail(format!("r = {}: lower certificate pairs to {ratio}, reported {}", self.r, self.lower));
        }
        if self.upper_certificate.iter().any(|c| c.order() > self.r) {
            return fail(format!("r = {}: upper certificate uses a cell above order r", self.r));
        }
        let weight = upper::cells_weight(&self.upper_certificate);
        if (weight - self.upper).abs() > CERTIFICATE_TOL * weight.max(1.0) {
            return fail(format!("r = {}: upper certificate weighs {weight}, reported {}", self.r, self.upper));
        }
        let residual = upper::expansion_residual(a, &self.upper_certificate)?;
        if residual > CERTIFICATE_TOL {
            return fail(format!("r = {}: upper certificate does not reproduce the chain (residual {residual:e})", self.r));
        }
        Ok(())
    }
}

fn assemble(a: &PointedChain, ub: UpperBound, budget: &FrequencyBudget, exec: Exec) -> Result<NormEstimate> {
    let steps: Vec<Vec<f64>> =
        ub.cells.iter().flat_map(|c| c.steps.iter().cloned()).take(CERTIFICATE_DIRECTIONS).collect();
    let budget = budget.clone().with_directions(&steps);
    let lb = lower::norm_lower_with(a, ub.r, &budget, exec)?;
    Ok(NormEstimate {
        r: ub.r,
        lower: lb.value,
        upper: ub.value,
        lower_certificate: lb.certificate,
        lower_certificate_bound: lb.certificate_bound,
        upper_certificate: ub.cells,
    })
}

/// The sandwich for one order r.
pub fn estimate(a: &PointedChain, r: usize, budget: &FrequencyBudget) -> Result<NormEstimate> {
    estimate_with(a, r, budget, Exec::default())
}

pub fn estimate_with(a: &PointedChain, r: usize, budget: &FrequencyBudget, exec: Exec) -> Result<NormEstimate> {
    let ub = upper::norm_upper_with(a, r, exec)?;
    assemble(a, ub, budget, exec)
}

/// Sandwiches for r = 0..=r_max, sharing one upper-bound pass.
pub fn estimate_orders(a: &PointedChain, r_max: usize, budget: &FrequencyBudget, exec: Exec) -> Result<Vec<NormEstimate>> {
    upper::upper_bounds(a, r_max, exec)?.into_iter().map(|ub| assemble(a, ub, budget, exec)).collect()
}
