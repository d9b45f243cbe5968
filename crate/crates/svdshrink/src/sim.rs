//! Seeded simulation harness: synthetic designs, coefficient regimes, and
//! the SURE-versus-out-of-sample-SSE experiment protocol.
//!
//! A single experiment draws a training design `X`, forms the rotated model
//! `y = U diag(d) α₀ + ε`, tunes every requested method by minimizing its
//! unbiased risk estimate, and then scores each tuned fit on freshly drawn
//! test responses. Every random draw comes from a deterministic, purpose-
//! labelled stream (see [`crate::rng`]), so an experiment is a pure function
//! of its [`SimConfig`] — including under parallel execution.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{shrink_global, shrink_horseshoe, Family, Prior, ShrinkageSpec};
use crate::numeric::pairwise_sum;
use crate::ortho::{decompose_design, ols_ortho, reconstruct_beta, RegressionData};
use crate::risk::{
    minimize_sure_k, minimize_sure_lambda, minimize_sure_tau, LassoSearchControl, SearchControl,
};
use crate::rng::{stream_rng, Stream};

/// How the training (and optionally test) design matrix is generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DesignKind {
    /// `Xᵢ = B Fᵢ + ξᵢ` with `B` the all-ones `p × k` loading matrix,
    /// `Fᵢ` i.i.d. standard normal factor scores and `ξᵢ ~ N(0, noise_sd²)`.
    /// Produces one dominant direction and a long flat tail of singular
    /// values — the ill-conditioned regime.
    Factor { k: usize, noise_sd: f64 },
    /// I.i.d. standard normal entries.
    Gaussian,
    /// An `n × p` matrix with all `n` singular values exactly 1, built from
    /// a uniformly random orthonormal frame (requires `p ≥ n`).
    Orthogonal,
}

/// How the true rotated coefficients `α₀` are generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum AlphaScheme {
    /// `n_signals` positions chosen uniformly without replacement receive
    /// `N(signal_mean, signal_sd²)` draws; the remainder receive
    /// `N(0, noise_sd²)`.
    SparseRobust {
        n_signals: usize,
        signal_mean: f64,
        signal_sd: f64,
        noise_sd: f64,
    },
    /// Deterministic-magnitude variant: signals exactly `signal_value`,
    /// remainder `±noise_abs` with independent random signs.
    SparseFixed {
        n_signals: usize,
        signal_value: f64,
        noise_abs: f64,
    },
    /// All coefficients zero.
    Null,
    /// All coefficients equal to `value`.
    Dense { value: f64 },
}

/// An estimation method the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ridge,
    Pcr,
    GPrior,
    Horseshoe,
    Lasso,
}

impl Method {
    /// Stable lowercase name used in reports and on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Method::Ridge => "ridge",
            Method::Pcr => "pcr",
            Method::GPrior => "gprior",
            Method::Horseshoe => "horseshoe",
            Method::Lasso => "lasso",
        }
    }

    /// The shrinkage family behind this method, when it has one.
    pub fn family(&self) -> Option<Family> {
        match self {
            Method::Ridge => Some(Family::Ridge),
            Method::Pcr => Some(Family::Pcr),
            Method::GPrior => Some(Family::GPrior),
            Method::Horseshoe => Some(Family::Horseshoe),
            Method::Lasso => None,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ridge" => Ok(Method::Ridge),
            "pcr" => Ok(Method::Pcr),
            "gprior" | "g-prior" => Ok(Method::GPrior),
            "horseshoe" | "hs" => Ok(Method::Horseshoe),
            "lasso" => Ok(Method::Lasso),
            other => Err(Error::InvalidInput(format!(
                "unknown method '{other}' (expected ridge, pcr, gprior, horseshoe or lasso)"
            ))),
        }
    }
}

/// Full specification of one simulation experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Training observations.
    pub n: usize,
    /// Covariates.
    pub p: usize,
    /// Design generator.
    pub design: DesignKind,
    /// Coefficient generator (in the rotated basis).
    pub alpha: AlphaScheme,
    /// Noise standard deviation (known to the tuner).
    pub sigma: f64,
    /// Number of independent test draws.
    pub n_test_sets: usize,
    /// Rows per test set; defaults to `n`. Must equal `n` unless `redraw_x`
    /// is set (test responses are drawn on the training design).
    #[serde(default)]
    pub test_size: Option<usize>,
    /// Redraw the design matrix for each test set instead of reusing the
    /// training design (sensitivity mode).
    #[serde(default)]
    pub redraw_x: bool,
    /// Master seed; every stream is derived from it.
    pub seed: u64,
    /// Methods to fit and score.
    pub methods: Vec<Method>,
}

impl SimConfig {
    /// Rows per test set after applying the default.
    pub fn effective_test_size(&self) -> usize {
        self.test_size.unwrap_or(self.n)
    }

    /// Check all invariants that do not require generating data.
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.p < 1 {
            return Err(Error::InvalidInput(format!(
                "need n >= 1 and p >= 1, got n = {}, p = {}",
                self.n, self.p
            )));
        }
        if self.n_test_sets < 1 {
            return Err(Error::InvalidInput("need at least one test set".into()));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        match self.design {
            DesignKind::Factor { k, noise_sd } => {
                if k < 1 {
                    return Err(Error::InvalidInput("factor design needs k >= 1".into()));
                }
                if !(noise_sd > 0.0) || !noise_sd.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "factor noise sd must be positive and finite, got {noise_sd}"
                    )));
                }
            }
            DesignKind::Orthogonal => {
                if self.p < self.n {
                    return Err(Error::InvalidInput(format!(
                        "orthogonal design requires p >= n, got n = {}, p = {}",
                        self.n, self.p
                    )));
                }
            }
            DesignKind::Gaussian => {}
        }
        match self.alpha {
            AlphaScheme::SparseRobust {
                signal_mean,
                signal_sd,
                noise_sd,
                ..
            } => {
                if !signal_mean.is_finite()
                    || !(signal_sd > 0.0)
                    || !signal_sd.is_finite()
                    || !(noise_sd > 0.0)
                    || !noise_sd.is_finite()
                {
                    return Err(Error::InvalidInput(
                        "sparse_robust scales must be positive and finite".into(),
                    ));
                }
            }
            AlphaScheme::SparseFixed {
                signal_value,
                noise_abs,
                ..
            } => {
                if !signal_value.is_finite() || !(noise_abs >= 0.0) || !noise_abs.is_finite() {
                    return Err(Error::InvalidInput(
                        "sparse_fixed values must be finite (noise_abs >= 0)".into(),
                    ));
                }
            }
            AlphaScheme::Dense { value } => {
                if !value.is_finite() {
                    return Err(Error::InvalidInput("dense value must be finite".into()));
                }
            }
            AlphaScheme::Null => {}
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidInput("need at least one method".into()));
        }
        if let Some(ts) = self.test_size {
            if ts < 1 {
                return Err(Error::InvalidInput("test_size must be >= 1".into()));
            }
            if !self.redraw_x && ts != self.n {
                return Err(Error::InvalidInput(format!(
                    "test responses are drawn on the training design, so test_size ({ts}) must \
                     equal n ({}); set redraw_x to change the test design",
                    self.n
                )));
            }
        }
        Ok(())
    }
}

/// Tuned fit and out-of-sample score for one method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    /// Total unbiased risk estimate at the tuned parameter.
    pub sure_total: f64,
    /// Mean SSE over the test sets.
    pub mean_sse: f64,
    /// Sample standard deviation of SSE over the test sets (0 if only one).
    pub sd_sse: f64,
    /// Tuned scale, for the scale families.
    pub tau_star: Option<f64>,
    /// Tuned cutoff, for PCR.
    pub k_star: Option<usize>,
    /// Tuned penalty, for the lasso.
    pub lambda_star: Option<f64>,
    /// Per-component risk estimates (absent for the lasso).
    pub per_component_sure: Option<Vec<f64>>,
}

/// Everything produced by one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    /// One summary per requested method, in request order.
    pub summaries: Vec<MethodSummary>,
    /// True rotated coefficients used to generate the data.
    pub alpha_true: DVector<f64>,
    /// Rotated least-squares estimates from the training response.
    pub alpha_hat: DVector<f64>,
    /// Singular values of the training design.
    pub d: DVector<f64>,
    /// Noise standard deviation.
    pub sigma: f64,
}

impl ExperimentResult {
    /// The summary for a method, if it was run.
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }
}

/// One row of a component-wise risk profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    /// 1-based component index (components are ordered by decreasing `dᵢ`).
    pub component: usize,
    /// Singular value `dᵢ`.
    pub d: f64,
    /// Standardized signal `α̂ᵢ dᵢ`.
    pub alpha_hat_d: f64,
    /// Per-component risk estimate.
    pub sure: f64,
}

/// Factor-model design: `Xᵢ = B Fᵢ + ξᵢ` with all-ones loadings (see
/// [`DesignKind::Factor`]). Deterministic given `seed`.
pub fn gen_factor_design(
    n: usize,
    p: usize,
    k: usize,
    noise_sd: f64,
    seed: u64,
) -> Result<DMatrix<f64>> {
    gen_factor_design_at(n, p, k, noise_sd, seed, 0)
}

fn gen_factor_design_at(
    n: usize,
    p: usize,
    k: usize,
    noise_sd: f64,
    seed: u64,
    index: u64,
) -> Result<DMatrix<f64>> {
    if n < 1 || p < 1 || k < 1 {
        return Err(Error::InvalidInput(format!(
            "need n, p, k >= 1, got n = {n}, p = {p}, k = {k}"
        )));
    }
    if !(noise_sd >= 0.0) || !noise_sd.is_finite() {
        return Err(Error::InvalidInput(format!(
            "noise sd must be finite and >= 0, got {noise_sd}"
        )));
    }
    let mut rng = stream_rng(seed, Stream::Design, index);
    // With all-ones loadings, (B Fᵢ)ⱼ = Σ_l F_{il} for every j: draw the k
    // factor scores per row and keep only their sum.
    let mut common = DVector::<f64>::zeros(n);
    for i in 0..n {
        let mut acc = 0.0;
        for _ in 0..k {
            acc += rng.sample::<f64, _>(StandardNormal);
        }
        common[i] = acc;
    }
    let noise = Normal::new(0.0, noise_sd)
        .map_err(|e| Error::InvalidInput(format!("invalid noise law: {e}")))?;
    let mut x = DMatrix::<f64>::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            x[(i, j)] = common[i] + rng.sample(noise);
        }
    }
    Ok(x)
}

/// Generate a design matrix of the given kind. Deterministic given `seed`.
pub fn gen_design(kind: &DesignKind, n: usize, p: usize, seed: u64) -> Result<DMatrix<f64>> {
    gen_design_at(kind, n, p, seed, 0)
}

fn gen_design_at(
    kind: &DesignKind,
    n: usize,
    p: usize,
    seed: u64,
    index: u64,
) -> Result<DMatrix<f64>> {
    if n < 1 || p < 1 {
        return Err(Error::InvalidInput(format!(
            "need n, p >= 1, got n = {n}, p = {p}"
        )));
    }
    match *kind {
        DesignKind::Factor { k, noise_sd } => gen_factor_design_at(n, p, k, noise_sd, seed, index),
        DesignKind::Gaussian => {
            let mut rng = stream_rng(seed, Stream::Design, index);
            Ok(DMatrix::from_fn(n, p, |_, _| rng.sample(StandardNormal)))
        }
        DesignKind::Orthogonal => {
            if p < n {
                return Err(Error::InvalidInput(format!(
                    "orthogonal design requires p >= n, got n = {n}, p = {p}"
                )));
            }
            let mut rng = stream_rng(seed, Stream::Design, index);
            let g = DMatrix::<f64>::from_fn(p, n, |_, _| rng.sample(StandardNormal));
            // Thin QR of a p × n Gaussian matrix gives a uniformly random
            // orthonormal n-frame in ℝᵖ; its transpose has all singular
            // values exactly 1.
            let q = g.qr().q();
            Ok(q.transpose())
        }
    }
}

/// Generate true rotated coefficients under `scheme`. Deterministic given
/// `seed`; draws are made in component order (signal positions first).
pub fn gen_alpha(scheme: &AlphaScheme, m: usize, seed: u64) -> Result<DVector<f64>> {
    if m < 1 {
        return Err(Error::InvalidInput("need at least one component".into()));
    }
    let mut rng = stream_rng(seed, Stream::Alpha, 0);
    match *scheme {
        AlphaScheme::Null => Ok(DVector::zeros(m)),
        AlphaScheme::Dense { value } => {
            if !value.is_finite() {
                return Err(Error::InvalidInput("dense value must be finite".into()));
            }
            Ok(DVector::from_element(m, value))
        }
        AlphaScheme::SparseRobust {
            n_signals,
            signal_mean,
            signal_sd,
            noise_sd,
        } => {
            if n_signals > m {
                return Err(Error::InvalidInput(format!(
                    "{n_signals} signals requested but only {m} components"
                )));
            }
            let signal = Normal::new(signal_mean, signal_sd)
                .map_err(|e| Error::InvalidInput(format!("invalid signal law: {e}")))?;
            let noise = Normal::new(0.0, noise_sd)
                .map_err(|e| Error::InvalidInput(format!("invalid noise law: {e}")))?;
            let mut is_signal = vec![false; m];
            for idx in rand::seq::index::sample(&mut rng, m, n_signals) {
                is_signal[idx] = true;
            }
            Ok(DVector::from_fn(m, |i, _| {
                if is_signal[i] {
                    rng.sample(signal)
                } else {
                    rng.sample(noise)
                }
            }))
        }
        AlphaScheme::SparseFixed {
            n_signals,
            signal_value,
            noise_abs,
        } => {
            if n_signals > m {
                return Err(Error::InvalidInput(format!(
                    "{n_signals} signals requested but only {m} components"
                )));
            }
            let mut is_signal = vec![false; m];
            for idx in rand::seq::index::sample(&mut rng, m, n_signals) {
                is_signal[idx] = true;
            }
            Ok(DVector::from_fn(m, |i, _| {
                if is_signal[i] {
                    signal_value
                } else if rng.random::<bool>() {
                    noise_abs
                } else {
                    -noise_abs
                }
            }))
        }
    }
}

/// Fitted values `U (d ∘ α̃)` on the training design.
fn fitted_values(
    u: &DMatrix<f64>,
    d: &DVector<f64>,
    alpha_tilde: &DVector<f64>,
) -> DVector<f64> {
    u * DVector::from_iterator(
        d.len(),
        alpha_tilde.iter().zip(d.iter()).map(|(a, di)| a * di),
    )
}

/// Run one full experiment: generate, tune every method by risk
/// minimization, and score on fresh test responses.
pub fn run_experiment(config: &SimConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let x = gen_design_at(&config.design, config.n, config.p, config.seed, 0)?;
    let dec = decompose_design(&x, None)?;
    let m = dec.m();
    let alpha_true = gen_alpha(&config.alpha, m, config.seed)?;

    // Training response y = U (d ∘ α₀) + ε.
    let signal = fitted_values(&dec.u, &dec.d, &alpha_true);
    let mut train_rng = stream_rng(config.seed, Stream::TrainNoise, 0);
    let y = DVector::from_fn(config.n, |i, _| {
        signal[i] + config.sigma * train_rng.sample::<f64, _>(StandardNormal)
    });
    let coeffs = ols_ortho(&dec, &y)?;
    let data = RegressionData::new(x.clone(), y.clone())?;

    // Tune each method and record its fit.
    struct TunedFit {
        method: Method,
        sure_total: f64,
        tau_star: Option<f64>,
        k_star: Option<usize>,
        lambda_star: Option<f64>,
        per_component_sure: Option<Vec<f64>>,
        /// Fitted training values (fixed design) and covariate-basis
        /// coefficients (redrawn designs).
        fitted: DVector<f64>,
        beta: DVector<f64>,
    }

    let mut fits: Vec<TunedFit> = Vec::with_capacity(config.methods.len());
    for &method in &config.methods {
        let fit = match method {
            Method::Ridge | Method::GPrior | Method::Horseshoe => {
                let family = method.family().expect("scale family");
                let (tau, breakdown) =
                    minimize_sure_tau(&coeffs, family, config.sigma, &SearchControl::default())?;
                let spec = ShrinkageSpec::new(
                    match family {
                        Family::Ridge => Prior::Ridge { tau },
                        Family::GPrior => Prior::GPrior { tau },
                        _ => Prior::Horseshoe { tau },
                    },
                    config.sigma,
                )?;
                let alpha_tilde = match family {
                    Family::Horseshoe => shrink_horseshoe(&coeffs, &spec)?,
                    _ => shrink_global(&coeffs, &spec)?,
                };
                TunedFit {
                    method,
                    sure_total: breakdown.total,
                    tau_star: Some(tau),
                    k_star: None,
                    lambda_star: None,
                    per_component_sure: Some(breakdown.per_component),
                    fitted: fitted_values(&dec.u, &dec.d, &alpha_tilde),
                    beta: reconstruct_beta(&alpha_tilde, &dec)?,
                }
            }
            Method::Pcr => {
                let (k, breakdown) = minimize_sure_k(&coeffs, config.sigma)?;
                let spec = ShrinkageSpec::new(Prior::Pcr { k }, config.sigma)?;
                let alpha_tilde = shrink_global(&coeffs, &spec)?;
                TunedFit {
                    method,
                    sure_total: breakdown.total,
                    tau_star: None,
                    k_star: Some(k),
                    lambda_star: None,
                    per_component_sure: Some(breakdown.per_component),
                    fitted: fitted_values(&dec.u, &dec.d, &alpha_tilde),
                    beta: reconstruct_beta(&alpha_tilde, &dec)?,
                }
            }
            Method::Lasso => {
                let (fit, sure) =
                    minimize_sure_lambda(&data, config.sigma, &LassoSearchControl::default())?;
                TunedFit {
                    method,
                    sure_total: sure,
                    tau_star: None,
                    k_star: None,
                    lambda_star: Some(fit.lambda),
                    per_component_sure: None,
                    fitted: &x * &fit.beta,
                    beta: fit.beta,
                }
            }
        };
        fits.push(fit);
    }

    // Score each method on fresh test responses. Test set j has its own
    // noise stream (and design stream when redrawing), so the parallel
    // schedule cannot affect the results.
    let test_size = config.effective_test_size();
    let beta_true = reconstruct_beta(&alpha_true, &dec)?;
    let sse_by_set: Vec<Vec<f64>> = (0..config.n_test_sets)
        .into_par_iter()
        .map(|j| -> Result<Vec<f64>> {
            let mut noise_rng = stream_rng(config.seed, Stream::TestNoise, j as u64);
            if config.redraw_x {
                let x_test =
                    gen_design_at(&config.design, test_size, config.p, config.seed, j as u64 + 1)?;
                let y_test = DVector::from_fn(test_size, |_, _| {
                    config.sigma * noise_rng.sample::<f64, _>(StandardNormal)
                }) + &x_test * &beta_true;
                Ok(fits
                    .iter()
                    .map(|f| (&y_test - &x_test * &f.beta).norm_squared())
                    .collect())
            } else {
                let y_test = DVector::from_fn(config.n, |i, _| {
                    signal[i] + config.sigma * noise_rng.sample::<f64, _>(StandardNormal)
                });
                Ok(fits
                    .iter()
                    .map(|f| (&y_test - &f.fitted).norm_squared())
                    .collect())
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let summaries = fits
        .into_iter()
        .enumerate()
        .map(|(mi, f)| {
            let sses: Vec<f64> = sse_by_set.iter().map(|row| row[mi]).collect();
            let mean = pairwise_sum(&sses) / sses.len() as f64;
            let sd = if sses.len() > 1 {
                let sq: Vec<f64> = sses.iter().map(|v| (v - mean) * (v - mean)).collect();
                (pairwise_sum(&sq) / (sses.len() - 1) as f64).sqrt()
            } else {
                0.0
            };
            MethodSummary {
                method: f.method,
                sure_total: f.sure_total,
                mean_sse: mean,
                sd_sse: sd,
                tau_star: f.tau_star,
                k_star: f.k_star,
                lambda_star: f.lambda_star,
                per_component_sure: f.per_component_sure,
            }
        })
        .collect();

    Ok(ExperimentResult {
        summaries,
        alpha_true,
        alpha_hat: coeffs.alpha_hat,
        d: coeffs.d,
        sigma: config.sigma,
    })
}

/// Component-wise risk profile `(i, dᵢ, α̂ᵢdᵢ, SUREᵢ)` for one method, rows
/// ordered by decreasing `dᵢ` (the component order). The lasso has no
/// componentwise decomposition and is rejected.
pub fn component_sure_profile(result: &ExperimentResult, method: Method) -> Result<Vec<ProfileRow>> {
    let summary = result.summary(method).ok_or_else(|| {
        Error::InvalidInput(format!("method '{method}' was not part of the experiment"))
    })?;
    let per = summary.per_component_sure.as_ref().ok_or_else(|| {
        Error::InvalidInput(format!("method '{method}' has no componentwise profile"))
    })?;
    Ok((0..per.len())
        .map(|i| ProfileRow {
            component: i + 1,
            d: result.d[i],
            alpha_hat_d: result.alpha_hat[i] * result.d[i],
            sure: per[i],
        })
        .collect())
}
