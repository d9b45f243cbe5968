//! Shrinkage estimators in the orthogonalized basis.
//!
//! All four Bayes-flavoured families act componentwise on the rotated
//! least-squares coefficients `α̂ᵢ`:
//!
//! * **ridge**, **principal components (PCR)** and the **g-prior** shrink by
//!   deterministic factors `fᵢ = τ²λᵢ²dᵢ² / (1 + τ²λᵢ²dᵢ²)` with `λᵢ² = 1`,
//!   a 0/1 cutoff, and `λᵢ² = dᵢ⁻²` respectively;
//! * the **horseshoe** posterior mean is `α̃ᵢ = α̂ᵢ (1 − E(Zᵢ))` where
//!   `Zᵢ ~ CCH(1, ½, 1, sᵢ, 1, θᵢ)` with `sᵢ = α̂ᵢ²dᵢ²/(2σ²)` and
//!   `θᵢ = 1/(τ²dᵢ²)` (see [`crate::cch`]).
//!
//! The module also provides the closed-form optimal linear shrinker for an
//! orthogonal design (the jamais-vu `(1 − mσ²/‖α̂‖²)` factor used as a
//! Monte-Carlo benchmark) and a coordinate-descent lasso whose degrees of
//! freedom feed the unbiased-risk comparison in [`crate::risk`].

use nalgebra::DVector;
use rayon::prelude::*;

use crate::cch;
use crate::error::{Error, Result};
use crate::ortho::{reconstruct_beta, DesignDecomposition, OrthoCoefficients, RegressionData};

/// Tag identifying one of the componentwise shrinkage families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Ridge,
    Pcr,
    GPrior,
    Horseshoe,
}

impl Family {
    /// Stable lowercase name used in reports and on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Family::Ridge => "ridge",
            Family::Pcr => "pcr",
            Family::GPrior => "gprior",
            Family::Horseshoe => "horseshoe",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ridge" => Ok(Family::Ridge),
            "pcr" => Ok(Family::Pcr),
            "gprior" | "g-prior" => Ok(Family::GPrior),
            "horseshoe" | "hs" => Ok(Family::Horseshoe),
            other => Err(Error::InvalidInput(format!(
                "unknown family '{other}' (expected ridge, pcr, gprior or horseshoe)"
            ))),
        }
    }
}

/// A shrinkage family together with its tuning parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prior {
    /// Ridge with prior scale `τ > 0`.
    Ridge { tau: f64 },
    /// Keep the leading `k` components (`0 ≤ k ≤ m`; `k = 0` is the null
    /// model, which the exhaustive tuner may select).
    Pcr { k: usize },
    /// g-prior with scale `τ > 0` (constant factor `τ²/(1+τ²)`).
    GPrior { tau: f64 },
    /// Horseshoe with global scale `τ > 0`.
    Horseshoe { tau: f64 },
}

impl Prior {
    /// The family this prior belongs to.
    pub fn family(&self) -> Family {
        match self {
            Prior::Ridge { .. } => Family::Ridge,
            Prior::Pcr { .. } => Family::Pcr,
            Prior::GPrior { .. } => Family::GPrior,
            Prior::Horseshoe { .. } => Family::Horseshoe,
        }
    }

    /// The scale parameter, if this family has one.
    pub fn tau(&self) -> Option<f64> {
        match self {
            Prior::Ridge { tau } | Prior::GPrior { tau } | Prior::Horseshoe { tau } => Some(*tau),
            Prior::Pcr { .. } => None,
        }
    }

    /// The component cutoff, if this family has one.
    pub fn k(&self) -> Option<usize> {
        match self {
            Prior::Pcr { k } => Some(*k),
            _ => None,
        }
    }
}

/// A fully specified estimator: prior plus noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrinkageSpec {
    pub prior: Prior,
    /// Noise standard deviation `σ > 0`.
    pub sigma: f64,
}

impl ShrinkageSpec {
    /// Validate scales: `τ > 0` (where present) and `σ > 0`, all finite.
    pub fn new(prior: Prior, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        if let Some(tau) = prior.tau() {
            if !(tau > 0.0) || !tau.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "tau must be positive and finite, got {tau}"
                )));
            }
        }
        Ok(ShrinkageSpec { prior, sigma })
    }

    /// The family of the underlying prior.
    pub fn family(&self) -> Family {
        self.prior.family()
    }
}

/// A fitted estimator: rotated and original-basis coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Shrunk coefficients in the orthogonalized basis, length `m`.
    pub alpha_tilde: DVector<f64>,
    /// Coefficients mapped back to the covariate basis, length `p`.
    pub beta_tilde: DVector<f64>,
    /// The estimator that produced the fit.
    pub spec: ShrinkageSpec,
    /// Total unbiased risk estimate, when the caller computed one.
    pub sure_total: Option<f64>,
}

/// Componentwise shrinkage factors `fᵢ ∈ [0, 1]` for the three global
/// families. The horseshoe has no such deterministic profile (its factor
/// depends on the data through `E(Zᵢ)`), so it is rejected here; use
/// [`shrink_horseshoe`] instead.
pub fn lambda_profile(spec: &ShrinkageSpec, d: &DVector<f64>) -> Result<Vec<f64>> {
    let m = d.len();
    if d.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput(
            "singular values must be positive and finite".into(),
        ));
    }
    match spec.prior {
        Prior::Ridge { tau } => Ok(d
            .iter()
            .map(|di| {
                let g = tau * tau * di * di;
                g / (1.0 + g)
            })
            .collect()),
        Prior::GPrior { tau } => {
            // λᵢ² = dᵢ⁻² cancels the design: constant factor τ²/(1+τ²).
            let f = tau * tau / (1.0 + tau * tau);
            Ok(vec![f; m])
        }
        Prior::Pcr { k } => {
            if k > m {
                return Err(Error::InvalidInput(format!(
                    "component cutoff {k} exceeds rank {m}"
                )));
            }
            Ok((0..m).map(|i| if i < k { 1.0 } else { 0.0 }).collect())
        }
        Prior::Horseshoe { .. } => Err(Error::InvalidInput(
            "the horseshoe has no deterministic shrinkage profile; use shrink_horseshoe".into(),
        )),
    }
}

/// Shrunk coefficients `α̃ = f ∘ α̂` for a global family (no basis change).
pub fn shrink_global(coeffs: &OrthoCoefficients, spec: &ShrinkageSpec) -> Result<DVector<f64>> {
    let factors = lambda_profile(spec, &coeffs.d)?;
    Ok(DVector::from_iterator(
        coeffs.m(),
        coeffs
            .alpha_hat
            .iter()
            .zip(factors.iter())
            .map(|(a, f)| a * f),
    ))
}

/// Horseshoe posterior mean `α̃ᵢ = α̂ᵢ (1 − E(Zᵢ))` (no basis change).
///
/// The factor `1 − E(Zᵢ)` is evaluated as the survival moment `E(1 − Zᵢ)`
/// so it keeps full relative precision even when shrinkage is nearly total.
/// Component moments are evaluated in parallel; the reduction is a plain
/// indexed collect, so results are bitwise deterministic regardless of the
/// number of threads.
pub fn shrink_horseshoe(coeffs: &OrthoCoefficients, spec: &ShrinkageSpec) -> Result<DVector<f64>> {
    let tau = match spec.prior {
        Prior::Horseshoe { tau } => tau,
        _ => {
            return Err(Error::InvalidInput(
                "shrink_horseshoe requires a horseshoe prior".into(),
            ))
        }
    };
    let sigma = spec.sigma;
    let factors: Vec<f64> = (0..coeffs.m())
        .into_par_iter()
        .map(|i| {
            let a = coeffs.alpha_hat[i];
            let di = coeffs.d[i];
            let s = a * a * di * di / (2.0 * sigma * sigma);
            let theta = 1.0 / (tau * tau * di * di);
            cch::shrinkage_survival(s, theta)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(DVector::from_iterator(
        coeffs.m(),
        coeffs
            .alpha_hat
            .iter()
            .zip(factors.iter())
            .map(|(a, f)| a * f),
    ))
}

/// Fit a global family and map back to the covariate basis.
pub fn global_posterior_mean(
    coeffs: &OrthoCoefficients,
    spec: &ShrinkageSpec,
    decomp: &DesignDecomposition,
) -> Result<FitResult> {
    let alpha_tilde = shrink_global(coeffs, spec)?;
    let beta_tilde = reconstruct_beta(&alpha_tilde, decomp)?;
    Ok(FitResult {
        alpha_tilde,
        beta_tilde,
        spec: *spec,
        sure_total: None,
    })
}

/// Fit the horseshoe posterior mean and map back to the covariate basis.
pub fn horseshoe_posterior_mean(
    coeffs: &OrthoCoefficients,
    spec: &ShrinkageSpec,
    decomp: &DesignDecomposition,
) -> Result<FitResult> {
    let alpha_tilde = shrink_horseshoe(coeffs, spec)?;
    let beta_tilde = reconstruct_beta(&alpha_tilde, decomp)?;
    Ok(FitResult {
        alpha_tilde,
        beta_tilde,
        spec: *spec,
        sure_total: None,
    })
}

/// Oracle linear shrinker for an orthogonal design (`dᵢ ≡ 1`):
/// `α*ᵢ = (1 − mσ²/Σⱼα̂ⱼ²) α̂ᵢ`.
///
/// The factor is applied as-is — it may be negative when the observed signal
/// energy is below `mσ²`, in which case the estimator points away from `α̂`;
/// callers that want the positive-part variant can clamp the returned
/// coefficients themselves. `Σα̂ⱼ² = 0` leaves the factor undefined.
pub fn optimal_ridge_orthogonal(coeffs: &OrthoCoefficients, sigma: f64) -> Result<DVector<f64>> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidInput(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    if coeffs.d.iter().any(|di| (di - 1.0).abs() > 1e-6) {
        return Err(Error::InvalidInput(
            "optimal_ridge_orthogonal requires an orthogonal design (all singular values 1)"
                .into(),
        ));
    }
    let m = coeffs.m() as f64;
    let energy: f64 = coeffs.alpha_hat.iter().map(|a| a * a).sum();
    if !(energy > 0.0) {
        return Err(Error::Degenerate(
            "observed signal energy is zero; the oracle shrinkage factor is undefined".into(),
        ));
    }
    let factor = 1.0 - m * sigma * sigma / energy;
    Ok(coeffs.alpha_hat.map(|a| factor * a))
}

/// Soft-thresholding operator `sign(z) · max(|z| − t, 0)`.
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// A lasso solution at one penalty value.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    /// Penalty the fit was computed at.
    pub lambda: f64,
    /// Coefficients in the covariate basis, length `p`.
    pub beta: DVector<f64>,
    /// Number of nonzero coefficients (the degrees of freedom used by the
    /// unbiased risk estimate).
    pub df: usize,
    /// Coordinate-descent sweeps actually used.
    pub sweeps: usize,
}

/// Default convergence tolerance for the lasso (max absolute coefficient
/// change per sweep).
pub const LASSO_TOL: f64 = 1e-7;

/// Default sweep budget for the lasso.
pub const LASSO_MAX_SWEEPS: usize = 100_000;

/// Lasso via cyclic coordinate descent on `½‖y − Xβ‖² + λ‖β‖₁`.
///
/// Convergence is declared when the maximum absolute coefficient change over
/// a full sweep drops to `tol` or below. Exceeding `max_iter` sweeps returns
/// [`Error::IterationBudget`] carrying the last iterate so callers can
/// inspect how close it got.
pub fn lasso_fit(
    data: &RegressionData,
    lambda: f64,
    tol: f64,
    max_iter: usize,
) -> Result<LassoFit> {
    let start = DVector::zeros(data.p());
    lasso_fit_warm(data, lambda, tol, max_iter, start)
}

/// [`lasso_fit`] starting from an explicit initial iterate (used by
/// [`lasso_path`] to warm-start along a decreasing penalty sequence).
pub fn lasso_fit_warm(
    data: &RegressionData,
    lambda: f64,
    tol: f64,
    max_iter: usize,
    mut beta: DVector<f64>,
) -> Result<LassoFit> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidInput(format!(
            "lasso penalty must be finite and >= 0, got {lambda}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if beta.len() != data.p() {
        return Err(Error::DimensionMismatch(format!(
            "warm start length {} does not match {} covariates",
            beta.len(),
            data.p()
        )));
    }
    let x = &data.x;
    let p = data.p();
    let col_sq: Vec<f64> = (0..p).map(|j| x.column(j).norm_squared()).collect();
    // Residual r = y − Xβ maintained incrementally.
    let mut resid = &data.y - x * &beta;

    let mut last_change = f64::INFINITY;
    for sweep in 1..=max_iter {
        let mut max_change = 0.0f64;
        for j in 0..p {
            if col_sq[j] == 0.0 {
                // A zero column never enters the active set.
                beta[j] = 0.0;
                continue;
            }
            let old = beta[j];
            let z = x.column(j).dot(&resid) + col_sq[j] * old;
            let new = soft_threshold(z, lambda) / col_sq[j];
            if new != old {
                resid -= x.column(j) * (new - old);
                beta[j] = new;
                max_change = max_change.max((new - old).abs());
            }
        }
        last_change = max_change;
        if max_change <= tol {
            let df = beta.iter().filter(|b| **b != 0.0).count();
            return Ok(LassoFit {
                lambda,
                beta,
                df,
                sweeps: sweep,
            });
        }
    }
    Err(Error::IterationBudget {
        max_iter,
        last_change,
        last_iterate: beta.as_slice().to_vec(),
    })
}

/// Solve the lasso along a penalty sequence with warm starts.
///
/// Penalties are visited in the order given; for efficiency pass them in
/// decreasing order so each solution seeds the next.
pub fn lasso_path(
    data: &RegressionData,
    lambdas: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<LassoFit>> {
    if lambdas.is_empty() {
        return Err(Error::InvalidInput("empty penalty sequence".into()));
    }
    let mut fits = Vec::with_capacity(lambdas.len());
    let mut warm = DVector::zeros(data.p());
    for &lambda in lambdas {
        let fit = lasso_fit_warm(data, lambda, tol, max_iter, warm.clone())?;
        warm = fit.beta.clone();
        fits.push(fit);
    }
    Ok(fits)
}

/// Smallest penalty that forces the all-zero lasso solution, `‖Xᵀy‖_∞`.
pub fn lasso_lambda_max(data: &RegressionData) -> f64 {
    (data.x.transpose() * &data.y)
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ortho::{decompose, ols_ortho};
    use crate::rng::{stream_rng, Stream};
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn coeffs(alpha_hat: Vec<f64>, d: Vec<f64>) -> OrthoCoefficients {
        OrthoCoefficients {
            alpha_hat: DVector::from_vec(alpha_hat),
            d: DVector::from_vec(d),
        }
    }

    #[test]
    fn gprior_factor_is_constant_half_at_unit_tau() {
        let spec = ShrinkageSpec::new(Prior::GPrior { tau: 1.0 }, 1.0).unwrap();
        let d = DVector::from_vec(vec![5.0, 0.1, 2.0]);
        let f = lambda_profile(&spec, &d).unwrap();
        for v in f {
            assert_relative_eq!(v, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn ridge_factors_match_hand_values() {
        let spec = ShrinkageSpec::new(Prior::Ridge { tau: 1.0 }, 1.0).unwrap();
        let d = DVector::from_vec(vec![2.0, 1.0]);
        let f = lambda_profile(&spec, &d).unwrap();
        assert_relative_eq!(f[0], 0.8, epsilon = 1e-15);
        assert_relative_eq!(f[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn ridge_factor_extremes_saturate_cleanly() {
        let d = DVector::from_vec(vec![1.0]);
        let big = ShrinkageSpec::new(Prior::Ridge { tau: 1e12 }, 1.0).unwrap();
        assert_relative_eq!(lambda_profile(&big, &d).unwrap()[0], 1.0, epsilon = 1e-15);
        let small = ShrinkageSpec::new(Prior::Ridge { tau: 1e-12 }, 1.0).unwrap();
        assert!(lambda_profile(&small, &d).unwrap()[0] < 1e-23);
    }

    #[test]
    fn pcr_profile_is_zero_one_cutoff() {
        let spec = ShrinkageSpec::new(Prior::Pcr { k: 2 }, 1.0).unwrap();
        let d = DVector::from_vec(vec![3.0, 2.0, 1.0, 0.5]);
        assert_eq!(lambda_profile(&spec, &d).unwrap(), vec![1.0, 1.0, 0.0, 0.0]);
        // K = m keeps everything (the least-squares fit); K = 0 kills it.
        let all = ShrinkageSpec::new(Prior::Pcr { k: 4 }, 1.0).unwrap();
        assert_eq!(lambda_profile(&all, &d).unwrap(), vec![1.0; 4]);
        let none = ShrinkageSpec::new(Prior::Pcr { k: 0 }, 1.0).unwrap();
        assert_eq!(lambda_profile(&none, &d).unwrap(), vec![0.0; 4]);
        let over = ShrinkageSpec::new(Prior::Pcr { k: 5 }, 1.0).unwrap();
        assert!(lambda_profile(&over, &d).is_err());
    }

    #[test]
    fn horseshoe_has_no_deterministic_profile() {
        let spec = ShrinkageSpec::new(Prior::Horseshoe { tau: 1.0 }, 1.0).unwrap();
        let d = DVector::from_vec(vec![1.0]);
        assert!(matches!(
            lambda_profile(&spec, &d),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn spec_validation_rejects_bad_scales() {
        assert!(ShrinkageSpec::new(Prior::Ridge { tau: 0.0 }, 1.0).is_err());
        assert!(ShrinkageSpec::new(Prior::Ridge { tau: -1.0 }, 1.0).is_err());
        assert!(ShrinkageSpec::new(Prior::Ridge { tau: f64::NAN }, 1.0).is_err());
        assert!(ShrinkageSpec::new(Prior::Ridge { tau: 1.0 }, 0.0).is_err());
        assert!(ShrinkageSpec::new(Prior::Pcr { k: 3 }, 1.0).is_ok());
    }

    #[test]
    fn family_parsing_roundtrips() {
        for f in [Family::Ridge, Family::Pcr, Family::GPrior, Family::Horseshoe] {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("elastic".parse::<Family>().is_err());
    }

    #[test]
    fn horseshoe_posterior_mean_matches_frozen_moment() {
        // s = (√2)²·1/2 = 1, θ = 1 → E(Z) = 0.57076929417224904004.
        let c = coeffs(vec![std::f64::consts::SQRT_2], vec![1.0]);
        let spec = ShrinkageSpec::new(Prior::Horseshoe { tau: 1.0 }, 1.0).unwrap();
        let alpha = shrink_horseshoe(&c, &spec).unwrap();
        let expect = std::f64::consts::SQRT_2 * (1.0 - 0.570_769_294_172_249_040_04);
        assert_relative_eq!(alpha[0], expect, max_relative = 1e-9);
    }

    #[test]
    fn horseshoe_preserves_sign_and_shrinks() {
        let c = coeffs(vec![3.0, -0.2, 0.0, 12.0], vec![1.0, 2.0, 0.5, 1.5]);
        let spec = ShrinkageSpec::new(Prior::Horseshoe { tau: 0.7 }, 1.3).unwrap();
        let alpha = shrink_horseshoe(&c, &spec).unwrap();
        for (at, ah) in alpha.iter().zip(c.alpha_hat.iter()) {
            assert!(at.abs() < ah.abs() || (*ah == 0.0 && *at == 0.0));
            assert!(at.signum() == ah.signum() || *ah == 0.0);
        }
    }

    #[test]
    fn horseshoe_keeps_strong_signals_nearly_unshrunk() {
        // s = 1e4²/2 = 5e7: the posterior mean should retain ≥ 99.9 % of α̂.
        let c = coeffs(vec![1e4], vec![1.0]);
        let spec = ShrinkageSpec::new(Prior::Horseshoe { tau: 1.0 }, 1.0).unwrap();
        let alpha = shrink_horseshoe(&c, &spec).unwrap();
        assert!(alpha[0] / 1e4 >= 0.999, "ratio {}", alpha[0] / 1e4);
    }

    #[test]
    fn global_fit_reconstructs_through_w() {
        let mut rng = stream_rng(42, Stream::Design, 0);
        let x = DMatrix::from_fn(12, 5, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(12, |_, _| rng.sample::<f64, _>(StandardNormal));
        let data = RegressionData::new(x, y).unwrap();
        let dec = decompose(&data, None).unwrap();
        let c = ols_ortho(&dec, &data.y).unwrap();
        let spec = ShrinkageSpec::new(Prior::Ridge { tau: 2.0 }, 1.0).unwrap();
        let fit = global_posterior_mean(&c, &spec, &dec).unwrap();
        let direct = &dec.w * &fit.alpha_tilde;
        assert_relative_eq!(fit.beta_tilde, direct, epsilon = 1e-14);
        assert!(fit.sure_total.is_none());
    }

    #[test]
    fn ridge_fit_matches_direct_linear_solve() {
        // With the prior scale expressed in noise units, the shrinkage factor
        // τ²d²/(1+τ²d²) corresponds to the penalized solve
        // (XᵀX + τ⁻² I)⁻¹ Xᵀ y; verify on a wide 20 × 50 problem.
        let mut rng = stream_rng(77, Stream::Design, 0);
        let x = DMatrix::from_fn(20, 50, |_, _| rng.sample::<f64, _>(StandardNormal));
        let beta_true = DVector::from_fn(50, |i, _| if i < 5 { 2.0 } else { 0.0 });
        let mut noise_rng = stream_rng(77, Stream::TrainNoise, 0);
        let y = &x * &beta_true
            + DVector::from_fn(20, |_, _| noise_rng.sample::<f64, _>(StandardNormal));
        let data = RegressionData::new(x.clone(), y.clone()).unwrap();
        let dec = decompose(&data, None).unwrap();
        let c = ols_ortho(&dec, &data.y).unwrap();
        let (tau, sigma) = (1.7, 0.9);
        let spec = ShrinkageSpec::new(Prior::Ridge { tau }, sigma).unwrap();
        let fit = global_posterior_mean(&c, &spec, &dec).unwrap();

        let ridge_penalty = 1.0 / (tau * tau);
        let gram = x.transpose() * &x + DMatrix::<f64>::identity(50, 50) * ridge_penalty;
        let beta_direct = gram
            .cholesky()
            .expect("SPD system")
            .solve(&(x.transpose() * &y));
        assert!(
            (fit.beta_tilde.clone() - &beta_direct).norm() <= 1e-8 * beta_direct.norm(),
            "relative gap {}",
            (fit.beta_tilde - &beta_direct).norm() / beta_direct.norm()
        );
    }

    #[test]
    fn pcr_with_full_rank_is_least_squares() {
        let c = coeffs(vec![1.0, -2.0, 0.5], vec![3.0, 2.0, 1.0]);
        let spec = ShrinkageSpec::new(Prior::Pcr { k: 3 }, 1.0).unwrap();
        let alpha = shrink_global(&c, &spec).unwrap();
        assert_relative_eq!(alpha, c.alpha_hat, epsilon = 1e-15);
    }

    #[test]
    fn optimal_ridge_matches_hand_value() {
        // m = 4, σ = 1, α̂ = (2,2,2,2): factor = 1 − 4/16 = 3/4.
        let c = coeffs(vec![2.0, 2.0, 2.0, 2.0], vec![1.0, 1.0, 1.0, 1.0]);
        let alpha = optimal_ridge_orthogonal(&c, 1.0).unwrap();
        for v in alpha.iter() {
            assert_relative_eq!(*v, 1.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn optimal_ridge_allows_negative_factor() {
        // Energy 0.25 < mσ² = 1 → factor 1 − 4 = −3.
        let c = coeffs(vec![0.5], vec![1.0]);
        let alpha = optimal_ridge_orthogonal(&c, 1.0).unwrap();
        assert_relative_eq!(alpha[0], -1.5, epsilon = 1e-14);
    }

    #[test]
    fn optimal_ridge_guards() {
        let c = coeffs(vec![0.0, 0.0], vec![1.0, 1.0]);
        assert!(matches!(
            optimal_ridge_orthogonal(&c, 1.0),
            Err(Error::Degenerate(_))
        ));
        let skewed = coeffs(vec![1.0], vec![2.0]);
        assert!(matches!(
            optimal_ridge_orthogonal(&skewed, 1.0),
            Err(Error::InvalidInput(_))
        ));
    }

    // ---- lasso ----

    #[test]
    fn lasso_identity_design_soft_thresholds() {
        // X = I₂, y = (3, 0.5), λ = 1 → β = (2, 0), df = 1.
        let data = RegressionData::new(
            DMatrix::<f64>::identity(2, 2),
            DVector::from_vec(vec![3.0, 0.5]),
        )
        .unwrap();
        let fit = lasso_fit(&data, 1.0, LASSO_TOL, LASSO_MAX_SWEEPS).unwrap();
        assert_relative_eq!(fit.beta[0], 2.0, epsilon = 1e-12);
        assert_eq!(fit.beta[1], 0.0);
        assert_eq!(fit.df, 1);
    }

    #[test]
    fn lasso_lambda_max_forces_zero_solution() {
        let mut rng = stream_rng(5, Stream::Design, 0);
        let x = DMatrix::from_fn(10, 4, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(10, |_, _| rng.sample::<f64, _>(StandardNormal));
        let data = RegressionData::new(x, y).unwrap();
        let lmax = lasso_lambda_max(&data);
        let fit = lasso_fit(&data, lmax, LASSO_TOL, LASSO_MAX_SWEEPS).unwrap();
        assert_eq!(fit.df, 0);
        assert_eq!(fit.beta, DVector::zeros(4));
    }

    #[test]
    fn lasso_zero_penalty_solves_least_squares() {
        let mut rng = stream_rng(6, Stream::Design, 0);
        let x = DMatrix::from_fn(30, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
        let beta_true = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let y = &x * &beta_true;
        let data = RegressionData::new(x.clone(), y.clone()).unwrap();
        let fit = lasso_fit(&data, 0.0, 1e-12, LASSO_MAX_SWEEPS).unwrap();
        let beta_ls = (x.transpose() * &x)
            .cholesky()
            .unwrap()
            .solve(&(x.transpose() * &y));
        assert!((fit.beta - beta_ls).norm() <= 1e-8);
    }

    #[test]
    fn lasso_path_warm_start_matches_cold_solutions() {
        let mut rng = stream_rng(8, Stream::Design, 0);
        let x = DMatrix::from_fn(25, 8, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(25, |_, _| 2.0 * rng.sample::<f64, _>(StandardNormal));
        let data = RegressionData::new(x, y).unwrap();
        let lmax = lasso_lambda_max(&data);
        let lambdas: Vec<f64> = (0..6).map(|i| lmax * 0.5f64.powi(i)).collect();
        let path = lasso_path(&data, &lambdas, 1e-10, LASSO_MAX_SWEEPS).unwrap();
        for (fit, &lambda) in path.iter().zip(lambdas.iter()) {
            let cold = lasso_fit(&data, lambda, 1e-10, LASSO_MAX_SWEEPS).unwrap();
            assert!(
                (fit.beta.clone() - &cold.beta).norm() <= 1e-6 * (1.0 + cold.beta.norm()),
                "warm/cold mismatch at lambda = {lambda}"
            );
        }
        // df is non-decreasing as the penalty decreases here.
        for w in path.windows(2) {
            assert!(w[0].df <= w[1].df + 1); // allow ties/small swaps
        }
    }

    #[test]
    fn lasso_iteration_budget_reports_last_iterate() {
        // A correlated design with an unattainable tolerance and a tiny sweep
        // budget must surface the budget error together with the iterate.
        let mut rng = stream_rng(9, Stream::Design, 0);
        let x = DMatrix::from_fn(20, 5, |i, j| {
            rng.sample::<f64, _>(StandardNormal) + if j == 0 { i as f64 / 10.0 } else { 0.0 }
        });
        let y = DVector::from_fn(20, |_, _| rng.sample::<f64, _>(StandardNormal));
        let hard = RegressionData::new(x, y).unwrap();
        match lasso_fit(&hard, 0.01, 1e-16, 2) {
            Err(Error::IterationBudget {
                last_iterate,
                last_change,
                ..
            }) => {
                assert_eq!(last_iterate.len(), 5);
                assert!(last_change.is_finite());
            }
            other => panic!("expected iteration budget error, got {other:?}"),
        }
    }

    #[test]
    fn lasso_rejects_bad_inputs() {
        let data = RegressionData::new(
            DMatrix::<f64>::identity(2, 2),
            DVector::from_vec(vec![1.0, 2.0]),
        )
        .unwrap();
        assert!(lasso_fit(&data, -1.0, 1e-7, 10).is_err());
        assert!(lasso_fit(&data, f64::NAN, 1e-7, 10).is_err());
        assert!(lasso_fit(&data, 1.0, 0.0, 10).is_err());
    }
}
