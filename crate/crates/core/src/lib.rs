//! Pointed (Dirac) k-chains in R^n.
//!
//! A pointed chain is a finite formal sum Σ (p_i; α_i) of points paired with
//! k-vectors. This crate provides:
//!
//! - [`exterior`]: k-vectors, k-covectors, wedge products and mass;
//! - [`forms`]: analytic test forms with exact directional derivatives and
//!   certified C^r bounds;
//! - [`chains`]: pointed and dipole chains, the pairing ∫_A ω and the
//!   operator P_v;
//! - [`norms`]: certified lower/upper bounds for ‖A‖_{B^r}, a grid LP oracle
//!   and the natural norm plateau;
//! - [`approx`]: Riemann chains of cells, cell boundaries, Stokes residuals
//!   and Cauchy-rate experiments;
//! - [`io`]: the plain-text chain, form and cell file formats.

pub mod approx;
pub mod chains;
pub mod corpus;
pub mod error;
pub mod exec;
pub mod exterior;
pub mod forms;
pub mod io;
pub mod lp;
pub mod norms;

pub use chains::{DipoleChain, PointedChain};
pub use error::{Error, Result};
pub use exec::Exec;
pub use exterior::{KCovector, KVector};
pub use forms::FormSpec;
