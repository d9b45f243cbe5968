//! Shrinkage regression in the singular-value basis.
//!
//! Write the linear model `y = Xβ + ε`, `ε ~ N(0, σ²Iₙ)`, through the thin
//! SVD `X = U diag(d) Wᵀ`. In the rotated coordinates `α = Wᵀβ` the least
//! squares estimates `α̂ᵢ = uᵢᵀy/dᵢ` are independent Gaussians with variance
//! `σ²/dᵢ²`, so an entire family of estimators can be written component-wise
//! as `α̃ᵢ = fᵢ·α̂ᵢ` with shrinkage factors `fᵢ ∈ [0, 1]`:
//!
//! * ridge, principal-components (PCR) and g-prior regression use factors
//!   `τ²λᵢ²dᵢ²/(1 + τ²λᵢ²dᵢ²)` that do not depend on the data;
//! * the horseshoe prior produces a data-dependent factor `1 − E(Zᵢ)`, where
//!   `Zᵢ` follows a compound confluent hypergeometric (CCH) distribution
//!   whose parameters are the signal strength `sᵢ = α̂ᵢ²dᵢ²/2σ²` and the
//!   inverse global scale `θᵢ = 1/(τ²dᵢ²)`.
//!
//! For each family the crate evaluates Stein's unbiased risk estimate (SURE)
//! of the prediction error exactly — for the horseshoe via CCH moments
//! computed by adaptive Gauss–Kronrod quadrature — plus closed-form risk
//! envelopes, SURE-minimizing tuning of `τ` and `K`, Monte Carlo risk
//! evaluation, and a fully seeded simulation harness.
//!
//! Module map:
//!
//! * [`ortho`] — thin SVD decomposition, rotated OLS, reconstruction.
//! * [`cch`] — CCH distribution: Φ₁ series, `H` normalizer, density, moments.
//! * [`estimators`] — posterior means for all families, optimal ridge, lasso.
//! * [`risk`] — SURE per family, bound envelopes, tuning, Monte Carlo risk.
//! * [`sim`] — design/coefficient generators and the experiment protocol.

pub mod cch;
pub mod error;
pub mod estimators;
pub mod numeric;
pub mod ortho;
pub mod quad;
pub mod risk;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
