//! Unbiased risk estimation, tuning searches, risk envelopes, and Monte
//! Carlo risk evaluation.
//!
//! For a componentwise rule `α̃ᵢ = fᵢ(α̂ᵢ) α̂ᵢ` the quadratic prediction risk
//! `E‖Z(α̃ − α)‖²` admits an unbiased estimate that decomposes over
//! components ("SURE"). The global families have the closed form
//!
//! ```text
//! SUREᵢ = α̂ᵢ²dᵢ² / (1 + gᵢ)² + 2σ² gᵢ / (1 + gᵢ),   gᵢ = τ²λᵢ²dᵢ²,
//! ```
//!
//! while the horseshoe's depends on the data through the moments of the
//! shrinkage weight `Zᵢ`:
//!
//! ```text
//! SUREᵢ = 2σ² [ 1 − E(Zᵢ) + 2sᵢ E(Zᵢ²) − sᵢ E(Zᵢ)² ].
//! ```
//!
//! An equivalent form written through the score of the marginal likelihood
//! (`sure_horseshoe_score`) is kept as an independently coded cross-check;
//! the two must agree to near machine precision and tests enforce that.
//!
//! Tuning minimizes the total over `τ` (log-space grid plus golden-section
//! refinement) or over the component cutoff `K` (exhaustive scan). The
//! envelope functions bound the per-component horseshoe SURE in the
//! strong-signal and null regimes, and `mc_risk` estimates frequentist risk
//! by simulation using either SURE averaging or direct squared loss.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::cch;
use crate::error::{Error, Result};
use crate::estimators::{
    optimal_ridge_orthogonal, shrink_horseshoe, Family, LassoFit, Prior, ShrinkageSpec,
};
use crate::estimators::{lasso_fit_warm, lasso_lambda_max};
use crate::numeric::pairwise_sum;
use crate::ortho::{OrthoCoefficients, RegressionData};
use crate::rng::{stream_rng, Stream};

/// Componentwise unbiased risk estimate with its total.
#[derive(Debug, Clone, PartialEq)]
pub struct SureBreakdown {
    /// Per-component contributions, in component order.
    pub per_component: Vec<f64>,
    /// Pairwise sum of `per_component`.
    pub total: f64,
    /// Scale parameter the breakdown was evaluated at, if the family has one.
    pub tau: Option<f64>,
    /// Component cutoff, if the family has one.
    pub k: Option<usize>,
    /// Noise standard deviation used.
    pub sigma: f64,
    /// Family the estimate belongs to.
    pub family: Family,
}

impl SureBreakdown {
    fn from_parts(
        per_component: Vec<f64>,
        tau: Option<f64>,
        k: Option<usize>,
        sigma: f64,
        family: Family,
    ) -> Self {
        let total = pairwise_sum(&per_component);
        SureBreakdown {
            per_component,
            total,
            tau,
            k,
            sigma,
            family,
        }
    }
}

/// Unbiased risk estimate for ridge, PCR or the g-prior.
pub fn sure_global(coeffs: &OrthoCoefficients, spec: &ShrinkageSpec) -> Result<SureBreakdown> {
    if coeffs.d.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput(
            "singular values must be positive and finite".into(),
        ));
    }
    let sigma2 = spec.sigma * spec.sigma;
    let m = coeffs.m();
    let per: Vec<f64> = match spec.prior {
        Prior::Ridge { tau } | Prior::GPrior { tau } => (0..m)
            .map(|i| {
                let d2 = coeffs.d[i] * coeffs.d[i];
                let lambda2 = match spec.prior {
                    Prior::Ridge { .. } => 1.0,
                    // λᵢ² = dᵢ⁻² exactly cancels dᵢ².
                    _ => 1.0 / d2,
                };
                let g = tau * tau * lambda2 * d2;
                let a2d2 = coeffs.alpha_hat[i] * coeffs.alpha_hat[i] * d2;
                let one_plus = 1.0 + g;
                a2d2 / (one_plus * one_plus) + 2.0 * sigma2 * g / one_plus
            })
            .collect(),
        Prior::Pcr { k } => {
            if k > m {
                return Err(Error::InvalidInput(format!(
                    "component cutoff {k} exceeds rank {m}"
                )));
            }
            (0..m)
                .map(|i| {
                    if i < k {
                        2.0 * sigma2
                    } else {
                        let ad = coeffs.alpha_hat[i] * coeffs.d[i];
                        ad * ad
                    }
                })
                .collect()
        }
        Prior::Horseshoe { .. } => {
            return Err(Error::InvalidInput(
                "use sure_horseshoe for the horseshoe family".into(),
            ))
        }
    };
    Ok(SureBreakdown::from_parts(
        per,
        spec.prior.tau(),
        spec.prior.k(),
        spec.sigma,
        spec.family(),
    ))
}

/// Per-component signal strength and prior-odds parameters of the horseshoe
/// shrinkage weight: `sᵢ = α̂ᵢ²dᵢ²/(2σ²)`, `θᵢ = 1/(τ²dᵢ²)`.
fn horseshoe_s_theta(coeffs: &OrthoCoefficients, tau: f64, sigma: f64, i: usize) -> (f64, f64) {
    let a = coeffs.alpha_hat[i];
    let di = coeffs.d[i];
    let s = a * a * di * di / (2.0 * sigma * sigma);
    let theta = 1.0 / (tau * tau * di * di);
    (s, theta)
}

fn horseshoe_tau(spec: &ShrinkageSpec) -> Result<f64> {
    match spec.prior {
        Prior::Horseshoe { tau } => Ok(tau),
        _ => Err(Error::InvalidInput(
            "this risk estimate requires a horseshoe prior".into(),
        )),
    }
}

/// Unbiased risk estimate for the horseshoe posterior mean, written through
/// the first two moments of the shrinkage weight.
pub fn sure_horseshoe(coeffs: &OrthoCoefficients, spec: &ShrinkageSpec) -> Result<SureBreakdown> {
    let tau = horseshoe_tau(spec)?;
    let sigma2 = spec.sigma * spec.sigma;
    let per: Vec<f64> = (0..coeffs.m())
        .into_par_iter()
        .map(|i| {
            let (s, theta) = horseshoe_s_theta(coeffs, tau, spec.sigma, i);
            let (ez, ez2) = cch::shrinkage_moments(s, theta)?;
            Ok(2.0 * sigma2 * (1.0 - ez + 2.0 * s * ez2 - s * ez * ez))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SureBreakdown::from_parts(
        per,
        Some(tau),
        None,
        spec.sigma,
        Family::Horseshoe,
    ))
}

/// Horseshoe risk estimate written through the derivatives of the marginal
/// likelihood (the score form `2σ² + σ⁴dᵢ⁻² [2 m″/m − (m′/m)²]`).
///
/// Algebraically identical to [`sure_horseshoe`]; coded independently so the
/// two routes cross-validate each other.
pub fn sure_horseshoe_score(
    coeffs: &OrthoCoefficients,
    spec: &ShrinkageSpec,
) -> Result<SureBreakdown> {
    let tau = horseshoe_tau(spec)?;
    let sigma2 = spec.sigma * spec.sigma;
    let per: Vec<f64> = (0..coeffs.m())
        .into_par_iter()
        .map(|i| {
            let a = coeffs.alpha_hat[i];
            let di = coeffs.d[i];
            let d2 = di * di;
            let (s, theta) = horseshoe_s_theta(coeffs, tau, spec.sigma, i);
            let (ez, ez2) = cch::shrinkage_moments(s, theta)?;
            // Score and curvature of the marginal likelihood of α̂ᵢ.
            let score = -(a * d2 / sigma2) * ez;
            let curvature = -(d2 / sigma2) * ez + (a * a * d2 * d2 / (sigma2 * sigma2)) * ez2;
            Ok(2.0 * sigma2 + sigma2 * sigma2 / d2 * (2.0 * curvature - score * score))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SureBreakdown::from_parts(
        per,
        Some(tau),
        None,
        spec.sigma,
        Family::Horseshoe,
    ))
}

/// Unbiased risk estimate for a lasso solution at fixed penalty:
/// `‖y − Xβ‖² + 2σ²·df`, with `df` the number of nonzero coefficients.
pub fn sure_lasso(data: &RegressionData, fit: &LassoFit, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidInput(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    if fit.beta.len() != data.p() {
        return Err(Error::DimensionMismatch(format!(
            "coefficient length {} does not match {} covariates",
            fit.beta.len(),
            data.p()
        )));
    }
    let resid = &data.y - &data.x * &fit.beta;
    Ok(resid.norm_squared() + 2.0 * sigma * sigma * fit.df as f64)
}

/// Controls for the scale search in [`minimize_sure_tau`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchControl {
    /// Lower end of the grid, as log₁₀ τ.
    pub log10_lo: f64,
    /// Upper end of the grid, as log₁₀ τ.
    pub log10_hi: f64,
    /// Number of grid points (≥ 2).
    pub grid_points: usize,
    /// Golden-section refinement stops when the bracket's width in τ falls
    /// to this fraction of τ.
    pub rel_width: f64,
}

impl Default for SearchControl {
    fn default() -> Self {
        SearchControl {
            log10_lo: -8.0,
            log10_hi: 4.0,
            grid_points: 121,
            rel_width: 1e-6,
        }
    }
}

impl SearchControl {
    fn validate(&self) -> Result<()> {
        if !(self.log10_lo < self.log10_hi)
            || !self.log10_lo.is_finite()
            || !self.log10_hi.is_finite()
        {
            return Err(Error::InvalidInput(format!(
                "search range [{}, {}] is not a finite increasing interval",
                self.log10_lo, self.log10_hi
            )));
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 grid points, got {}",
                self.grid_points
            )));
        }
        if !(self.rel_width > 0.0) {
            return Err(Error::InvalidInput(format!(
                "relative width must be positive, got {}",
                self.rel_width
            )));
        }
        Ok(())
    }
}

/// Minimize the total risk estimate over the scale `τ` for ridge, the
/// g-prior or the horseshoe.
///
/// Scans a uniform grid in log₁₀ τ, then refines inside the best grid
/// bracket by golden-section search; the answer is whichever of the grid and
/// refined candidates has the smaller total, with ties resolved toward the
/// smaller `τ` (stronger shrinkage). PCR has no scale — use
/// [`minimize_sure_k`].
pub fn minimize_sure_tau(
    coeffs: &OrthoCoefficients,
    family: Family,
    sigma: f64,
    search: &SearchControl,
) -> Result<(f64, SureBreakdown)> {
    search.validate()?;
    let breakdown_at = |tau: f64| -> Result<SureBreakdown> {
        let prior = match family {
            Family::Ridge => Prior::Ridge { tau },
            Family::GPrior => Prior::GPrior { tau },
            Family::Horseshoe => Prior::Horseshoe { tau },
            Family::Pcr => {
                return Err(Error::InvalidInput(
                    "PCR has no scale parameter; use minimize_sure_k".into(),
                ))
            }
        };
        let spec = ShrinkageSpec::new(prior, sigma)?;
        match family {
            Family::Horseshoe => sure_horseshoe(coeffs, &spec),
            _ => sure_global(coeffs, &spec),
        }
    };
    let eval = |log_tau: f64| -> Result<f64> {
        let total = breakdown_at(10f64.powf(log_tau))?.total;
        if !total.is_finite() {
            return Err(Error::SearchFailure(format!(
                "risk total is not finite at tau = {}",
                10f64.powf(log_tau)
            )));
        }
        Ok(total)
    };

    // Grid pass: strict improvement keeps the earlier (smaller) τ on ties.
    let n = search.grid_points;
    let step = (search.log10_hi - search.log10_lo) / (n - 1) as f64;
    let mut best_idx = 0usize;
    let mut best_val = f64::INFINITY;
    let mut grid_vals = Vec::with_capacity(n);
    for i in 0..n {
        let v = eval(search.log10_lo + i as f64 * step)?;
        if v < best_val {
            best_val = v;
            best_idx = i;
        }
        grid_vals.push(v);
    }
    let t_at = |i: usize| search.log10_lo + i as f64 * step;
    let (mut a, mut b) = (
        t_at(best_idx.saturating_sub(1)),
        t_at((best_idx + 1).min(n - 1)),
    );

    // Golden-section refinement inside [a, b] (in log₁₀ τ).
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    for _ in 0..200 {
        let width = 10f64.powf(b) - 10f64.powf(a);
        if width <= search.rel_width * 10f64.powf(0.5 * (a + b)) {
            break;
        }
        if fc <= fd {
            // Keep the left half on ties: prefers smaller τ.
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
        }
    }
    let (t_refined, v_refined) = if fc <= fd { (c, fc) } else { (d, fd) };

    // Final verdict: smaller total wins; ties go to the smaller τ.
    let t_grid = t_at(best_idx);
    let v_grid = grid_vals[best_idx];
    let t_star = if v_refined < v_grid || (v_refined == v_grid && t_refined < t_grid) {
        t_refined
    } else {
        t_grid
    };
    let tau_star = 10f64.powf(t_star);
    let breakdown = breakdown_at(tau_star)?;
    Ok((tau_star, breakdown))
}

/// Minimize the PCR risk estimate over the cutoff `K ∈ {0, …, m}` by
/// exhaustive scan; ties resolve toward the smaller `K`.
pub fn minimize_sure_k(
    coeffs: &OrthoCoefficients,
    sigma: f64,
) -> Result<(usize, SureBreakdown)> {
    let m = coeffs.m();
    let sigma2 = sigma * sigma;
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidInput(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    // Tail energies Σ_{i ≥ K} α̂ᵢ²dᵢ².
    let mut tail = vec![0.0f64; m + 1];
    for i in (0..m).rev() {
        let ad = coeffs.alpha_hat[i] * coeffs.d[i];
        tail[i] = tail[i + 1] + ad * ad;
    }
    let mut best_k = 0usize;
    let mut best_val = f64::INFINITY;
    for k in 0..=m {
        let v = 2.0 * sigma2 * k as f64 + tail[k];
        if v < best_val {
            best_val = v;
            best_k = k;
        }
    }
    let spec = ShrinkageSpec::new(Prior::Pcr { k: best_k }, sigma)?;
    let breakdown = sure_global(coeffs, &spec)?;
    Ok((best_k, breakdown))
}

/// Controls for the lasso penalty search in [`minimize_sure_lambda`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoSearchControl {
    /// Number of penalties on the geometric grid (≥ 1).
    pub n_grid: usize,
    /// Smallest penalty as a fraction of `‖Xᵀy‖_∞`.
    pub lambda_min_ratio: f64,
    /// Coordinate-descent tolerance.
    pub tol: f64,
    /// Coordinate-descent sweep budget.
    pub max_iter: usize,
}

impl Default for LassoSearchControl {
    fn default() -> Self {
        LassoSearchControl {
            n_grid: 100,
            lambda_min_ratio: 1e-4,
            tol: crate::estimators::LASSO_TOL,
            max_iter: crate::estimators::LASSO_MAX_SWEEPS,
        }
    }
}

/// Minimize the lasso risk estimate over a decreasing geometric penalty grid
/// anchored at `‖Xᵀy‖_∞` (where the solution is exactly zero), with warm
/// starts. Ties resolve toward the larger penalty (the sparser model).
pub fn minimize_sure_lambda(
    data: &RegressionData,
    sigma: f64,
    control: &LassoSearchControl,
) -> Result<(LassoFit, f64)> {
    if control.n_grid == 0 {
        return Err(Error::InvalidInput("empty penalty grid".into()));
    }
    if !(control.lambda_min_ratio > 0.0 && control.lambda_min_ratio <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "lambda_min_ratio must lie in (0, 1], got {}",
            control.lambda_min_ratio
        )));
    }
    let lmax = lasso_lambda_max(data);
    if lmax == 0.0 {
        // Xᵀy = 0: the zero solution is optimal at any penalty.
        let fit = lasso_fit_warm(data, 0.0, control.tol, control.max_iter, DVector::zeros(data.p()))?;
        let sure = sure_lasso(data, &fit, sigma)?;
        return Ok((fit, sure));
    }
    let ratio = if control.n_grid == 1 {
        1.0
    } else {
        control
            .lambda_min_ratio
            .powf(1.0 / (control.n_grid - 1) as f64)
    };
    let mut best: Option<(LassoFit, f64)> = None;
    let mut warm = DVector::zeros(data.p());
    let mut lambda = lmax;
    for _ in 0..control.n_grid {
        let fit = match lasso_fit_warm(data, lambda, control.tol, control.max_iter, warm.clone()) {
            Ok(fit) => fit,
            // Coordinate descent can stall near the bottom of the path on
            // pathologically correlated designs. Once at least one penalty
            // has converged, stop descending: candidates below a stalled
            // penalty would be even harder, and the incumbent stays valid.
            Err(Error::IterationBudget { .. }) if best.is_some() => break,
            Err(e) => return Err(e),
        };
        warm = fit.beta.clone();
        let sure = sure_lasso(data, &fit, sigma)?;
        // Strict improvement keeps the earlier (larger, sparser) penalty.
        if best.as_ref().map_or(true, |(_, b)| sure < *b) {
            best = Some((fit, sure));
        }
        lambda *= ratio;
    }
    Ok(best.expect("non-empty grid"))
}

/// Which regime a risk envelope applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Strong signal, `s ≥ 1` (with `θ ≥ 1`).
    LargeS,
    /// Exactly null signal, `s = 0` (with `θ ≥ 1`).
    SZero,
    /// Moderate signal, `s ≤ 1` (with `θ ≥ 1`).
    SOne,
}

/// Two-sided bound on the per-component horseshoe risk estimate, in units of
/// `σ²` (multiply both ends by `σ²` for general noise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEnvelope {
    pub lower: f64,
    pub upper: f64,
    pub regime: Regime,
}

/// Deterministic sandwich for the per-component horseshoe risk estimate in
/// the strong-signal regime `s ≥ 1`, `θ ≥ 1`:
///
/// ```text
/// lower = 2 max(0, 1 − θ(C̃₁+C̃₂)(1+s)/s² − θ²(C̃₁+C̃₂)²(1+s)²/s³)
/// upper = 2 (1 + 2θ(1+s)(C₁/s² + C₂/s^{3/2}))
/// ```
///
/// with `C₁ = (1 − 5/(2e))^{−1/2}`, `C₂ = 16/15`, `C̃₁ = 1 − 2/e`,
/// `C̃₂ = 4/3`. Both ends converge to 2 as `s → ∞`, pinning the estimate to
/// the least-squares level for strong signals.
pub fn bounds_large_s(s: f64, theta: f64) -> Result<BoundEnvelope> {
    if !(s >= 1.0) || !s.is_finite() {
        return Err(Error::Domain(format!(
            "large-signal envelope requires s >= 1, got {s}"
        )));
    }
    if !(theta >= 1.0) || !theta.is_finite() {
        return Err(Error::Domain(format!(
            "large-signal envelope requires theta >= 1, got {theta}"
        )));
    }
    let c1 = (1.0 - 5.0 / (2.0 * std::f64::consts::E)).powf(-0.5);
    let c2 = 16.0 / 15.0;
    let c1t = 1.0 - 2.0 / std::f64::consts::E;
    let c2t = 4.0 / 3.0;

    let one_plus_s = 1.0 + s;
    let lower_raw = 1.0
        - theta * (c1t + c2t) * one_plus_s / (s * s)
        - theta * theta * (c1t + c2t) * (c1t + c2t) * one_plus_s * one_plus_s / (s * s * s);
    let lower = 2.0 * lower_raw.max(0.0);
    let upper = 2.0 * (1.0 + 2.0 * theta * one_plus_s * (c1 / (s * s) + c2 / s.powf(1.5)));
    Ok(BoundEnvelope {
        lower,
        upper,
        regime: Regime::LargeS,
    })
}

/// Envelope at an exactly null component (`s = 0`) when the prior odds are
/// at least even (`θ ≥ 1`, i.e. `τ²dᵢ² ≤ 1`): the risk estimate sits in
/// `(0, 2/3]` in units of `σ²`.
pub fn envelope_s_zero() -> BoundEnvelope {
    BoundEnvelope {
        lower: 0.0,
        upper: 2.0 / 3.0,
        regime: Regime::SZero,
    }
}

/// Envelope over the moderate-signal range `s ∈ [0, 1]` with `θ ≥ 1`: the
/// risk estimate is increasing in `s` and tops out below `1.93 σ²` at
/// `s = 1`.
pub fn envelope_s_one() -> BoundEnvelope {
    BoundEnvelope {
        lower: 0.0,
        upper: 1.93,
        regime: Regime::SOne,
    }
}

/// Estimator whose frequentist risk [`mc_risk`] measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum McEstimator {
    /// Horseshoe posterior mean at fixed scale.
    Horseshoe { tau: f64 },
    /// Least squares (no shrinkage).
    Ols,
    /// Oracle linear shrinker `(1 − mσ²/‖α̂‖²) α̂` (orthogonal design).
    OptimalRidge,
}

/// How each replication is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskMode {
    /// Average the risk estimate itself (lower-variance; valid because its
    /// expectation is the risk). Available for estimators with a
    /// componentwise unbiased risk formula.
    SureAverage,
    /// Average the realized per-component loss `σ² + dᵢ²(α̃ᵢ − αᵢ)²`, whose
    /// expectation matches the SURE average.
    DirectLoss,
}

/// A Monte Carlo risk experiment: truth, design spectrum, estimator, mode.
#[derive(Debug, Clone, PartialEq)]
pub struct McScenario {
    /// True rotated coefficients, length `m`.
    pub alpha_true: DVector<f64>,
    /// Singular values, length `m`.
    pub d: DVector<f64>,
    /// Noise standard deviation.
    pub sigma: f64,
    /// Estimator under study.
    pub estimator: McEstimator,
    /// Scoring mode.
    pub mode: RiskMode,
}

/// Result of [`mc_risk`]: the estimated per-component risk and its standard
/// error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McRiskReport {
    /// Mean over replications of the per-component risk value.
    pub risk: f64,
    /// Standard error of that mean.
    pub std_error: f64,
    /// Number of replications.
    pub reps: usize,
    /// Scoring mode used.
    pub mode: RiskMode,
}

/// Estimate the frequentist risk of an estimator by simulation.
///
/// Each replication draws `α̂ᵢ ~ N(αᵢ, σ²/dᵢ²)` independently (replication
/// `j` uses its own deterministic RNG stream, so results are reproducible
/// and independent of the parallel schedule), applies the estimator, and
/// scores it per [`RiskMode`]. Returns the mean per-component value and its
/// standard error across replications.
pub fn mc_risk(scenario: &McScenario, reps: usize, seed: u64) -> Result<McRiskReport> {
    let m = scenario.alpha_true.len();
    if m == 0 || scenario.d.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "alpha_true has length {m} but d has length {}",
            scenario.d.len()
        )));
    }
    if scenario.d.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput(
            "singular values must be positive and finite".into(),
        ));
    }
    if scenario.alpha_true.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "true coefficients must be finite".into(),
        ));
    }
    if !(scenario.sigma > 0.0) || !scenario.sigma.is_finite() {
        return Err(Error::InvalidInput(format!(
            "sigma must be positive and finite, got {}",
            scenario.sigma
        )));
    }
    if reps < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 replications, got {reps}"
        )));
    }
    if matches!(
        (scenario.estimator, scenario.mode),
        (McEstimator::OptimalRidge, RiskMode::SureAverage)
    ) {
        return Err(Error::InvalidInput(
            "the oracle linear shrinker has no componentwise unbiased risk formula; \
             use DirectLoss"
                .into(),
        ));
    }

    let sigma = scenario.sigma;
    let sigma2 = sigma * sigma;
    let values: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream_rng(seed, Stream::MonteCarlo, j as u64);
            let alpha_hat = DVector::from_fn(m, |i, _| {
                scenario.alpha_true[i]
                    + sigma / scenario.d[i] * rng.sample::<f64, _>(StandardNormal)
            });
            let coeffs = OrthoCoefficients {
                alpha_hat,
                d: scenario.d.clone(),
            };
            match scenario.mode {
                RiskMode::SureAverage => {
                    let total = match scenario.estimator {
                        McEstimator::Horseshoe { tau } => {
                            let spec = ShrinkageSpec::new(Prior::Horseshoe { tau }, sigma)?;
                            sure_horseshoe(&coeffs, &spec)?.total
                        }
                        McEstimator::Ols => 2.0 * sigma2 * m as f64,
                        McEstimator::OptimalRidge => unreachable!("rejected above"),
                    };
                    Ok(total / m as f64)
                }
                RiskMode::DirectLoss => {
                    let alpha_tilde = match scenario.estimator {
                        McEstimator::Horseshoe { tau } => {
                            let spec = ShrinkageSpec::new(Prior::Horseshoe { tau }, sigma)?;
                            shrink_horseshoe(&coeffs, &spec)?
                        }
                        McEstimator::Ols => coeffs.alpha_hat.clone(),
                        McEstimator::OptimalRidge => optimal_ridge_orthogonal(&coeffs, sigma)?,
                    };
                    let losses: Vec<f64> = (0..m)
                        .map(|i| {
                            let gap = scenario.d[i] * (alpha_tilde[i] - scenario.alpha_true[i]);
                            sigma2 + gap * gap
                        })
                        .collect();
                    Ok(pairwise_sum(&losses) / m as f64)
                }
            }
        })
        .collect::<Result<Vec<f64>>>()?;

    let mean = pairwise_sum(&values) / reps as f64;
    let sq_dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let variance = pairwise_sum(&sq_dev) / (reps - 1) as f64;
    let std_error = (variance / reps as f64).sqrt();
    Ok(McRiskReport {
        risk: mean,
        std_error,
        reps,
        mode: scenario.mode,
    })
}
