//! Shared fitting plumbing for the `fit`, `sure`, `tune` and `evaluate`
//! commands: tune-by-risk-estimate wrappers and fixed-parameter fits, all
//! returning one report-ready structure.

use nalgebra::{DMatrix, DVector};
use svdshrink::estimators::{
    lasso_fit, lasso_lambda_max, lasso_path, shrink_global, shrink_horseshoe, Family, Prior,
    ShrinkageSpec, LASSO_MAX_SWEEPS, LASSO_TOL,
};
use svdshrink::ortho::{decompose_design, ols_ortho, reconstruct_beta, RegressionData};
use svdshrink::risk::{
    minimize_sure_k, minimize_sure_lambda, minimize_sure_tau, sure_global, sure_horseshoe,
    LassoSearchControl, SearchControl, SureBreakdown,
};
use svdshrink::sim::Method;

use crate::error::{CliError, Result};

/// A tuning-parameter value for one method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    /// Prior scale for ridge, the g-prior and the horseshoe.
    Tau(f64),
    /// Component cutoff for PCR.
    K(usize),
    /// Lasso penalty.
    Lambda(f64),
}

/// A fitted method with everything the report writers need.
#[derive(Debug, Clone)]
pub struct FittedModel {
    pub method: Method,
    pub tau: Option<f64>,
    pub k: Option<usize>,
    pub lambda: Option<f64>,
    /// Componentwise risk estimate (non-lasso methods, σ known).
    pub breakdown: Option<SureBreakdown>,
    /// Total risk estimate (all methods, σ known).
    pub sure_total: Option<f64>,
    /// Rotated least-squares coefficients (non-lasso methods).
    pub alpha_hat: Option<DVector<f64>>,
    /// Rotated shrunk coefficients (non-lasso methods).
    pub alpha_tilde: Option<DVector<f64>>,
    /// Singular values (non-lasso methods).
    pub d: Option<DVector<f64>>,
    /// Coefficients in the covariate basis, working units.
    pub beta: DVector<f64>,
    /// In-sample fitted values, working units.
    pub fitted: DVector<f64>,
    /// Nonzero-coefficient count (lasso).
    pub nonzero: Option<usize>,
}

impl FittedModel {
    /// Predict responses for new rows of predictors, working units.
    pub fn predict(&self, x_new: &DMatrix<f64>) -> DVector<f64> {
        x_new * &self.beta
    }
}

/// Tune a method by minimizing its unbiased risk estimate, then fit at the
/// chosen parameter. Uses the default search grids.
pub fn tune_sure(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    method: Method,
    sigma: f64,
) -> Result<FittedModel> {
    match method.family() {
        Some(family) => {
            let decomp = decompose_design(x, None)?;
            let coeffs = ols_ortho(&decomp, y)?;
            let (prior, breakdown) = match family {
                Family::Pcr => {
                    let (k, breakdown) = minimize_sure_k(&coeffs, sigma)?;
                    (Prior::Pcr { k }, breakdown)
                }
                _ => {
                    let (tau, breakdown) =
                        minimize_sure_tau(&coeffs, family, sigma, &SearchControl::default())?;
                    (prior_for(family, tau), breakdown)
                }
            };
            let spec = ShrinkageSpec::new(prior, sigma)?;
            let alpha_tilde = shrink(&coeffs, &spec)?;
            assemble_ortho(method, &decomp, &coeffs, alpha_tilde, prior, Some(breakdown))
        }
        None => {
            let data = RegressionData::new(x.clone(), y.clone())?;
            let (fit, sure) =
                minimize_sure_lambda(&data, sigma, &LassoSearchControl::default())?;
            Ok(assemble_lasso(x, fit.lambda, fit.beta, fit.df, Some(sure)))
        }
    }
}

/// Fit a method at a fixed parameter. `sigma` enables the risk-estimate
/// fields; the horseshoe estimator itself needs a noise scale and falls back
/// to the sample standard deviation of `y` when none is given.
pub fn fit_at(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    method: Method,
    param: Param,
    sigma: Option<f64>,
) -> Result<FittedModel> {
    let prior = match (method, param) {
        (Method::Ridge, Param::Tau(tau)) => Prior::Ridge { tau },
        (Method::GPrior, Param::Tau(tau)) => Prior::GPrior { tau },
        (Method::Horseshoe, Param::Tau(tau)) => Prior::Horseshoe { tau },
        (Method::Pcr, Param::K(k)) => Prior::Pcr { k },
        (Method::Lasso, Param::Lambda(lambda)) => {
            let data = RegressionData::new(x.clone(), y.clone())?;
            let fit = lasso_at(&data, lambda)?;
            let sure = match sigma {
                Some(s) => Some(svdshrink::risk::sure_lasso(&data, &fit, s)?),
                None => None,
            };
            return Ok(assemble_lasso(x, fit.lambda, fit.beta, fit.df, sure));
        }
        (m, p) => {
            return Err(CliError::Validation(format!(
                "method '{m}' does not take the supplied parameter kind ({p:?})"
            )))
        }
    };

    let decomp = decompose_design(x, None)?;
    let coeffs = ols_ortho(&decomp, y)?;
    if let Prior::Pcr { k } = prior {
        if k > decomp.m() {
            return Err(CliError::Validation(format!(
                "--k {} exceeds the design rank {}",
                k,
                decomp.m()
            )));
        }
    }
    // The estimator's own noise scale. Only the horseshoe factor depends on
    // it; without a user σ it runs at the sample standard deviation of the
    // responses (a scale-equivariant stand-in). The other factors ignore σ.
    let sigma_eff = match (sigma, method) {
        (Some(s), _) => s,
        (None, Method::Horseshoe) => {
            let sd = sample_sd(y);
            if sd == 0.0 {
                return Err(CliError::Validation(
                    "responses are constant; supply --sigma to fit the horseshoe".into(),
                ));
            }
            sd
        }
        (None, _) => 1.0,
    };
    let spec = ShrinkageSpec::new(prior, sigma_eff)?;
    let alpha_tilde = shrink(&coeffs, &spec)?;
    let breakdown = match sigma {
        Some(s) => {
            let spec_report = ShrinkageSpec::new(prior, s)?;
            Some(match spec_report.family() {
                Family::Horseshoe => sure_horseshoe(&coeffs, &spec_report)?,
                _ => sure_global(&coeffs, &spec_report)?,
            })
        }
        None => None,
    };
    assemble_ortho(method, &decomp, &coeffs, alpha_tilde, prior, breakdown)
}

/// The prior for a scale-family member.
pub fn prior_for(family: Family, tau: f64) -> Prior {
    match family {
        Family::Ridge => Prior::Ridge { tau },
        Family::GPrior => Prior::GPrior { tau },
        Family::Horseshoe => Prior::Horseshoe { tau },
        Family::Pcr => unreachable!("PCR has no scale parameter"),
    }
}

/// Posterior-mean shrinkage for any orthogonal-basis family.
pub fn shrink(
    coeffs: &svdshrink::ortho::OrthoCoefficients,
    spec: &ShrinkageSpec,
) -> svdshrink::Result<DVector<f64>> {
    match spec.family() {
        Family::Horseshoe => shrink_horseshoe(coeffs, spec),
        _ => shrink_global(coeffs, spec),
    }
}

/// Sample standard deviation (n−1 denominator).
pub fn sample_sd(v: &DVector<f64>) -> f64 {
    let n = v.len();
    let mean = v.iter().sum::<f64>() / n as f64;
    let ss: f64 = v.iter().map(|x| (x - mean) * (x - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// The τ grid the default scale search scans (also the CV candidate grid).
pub fn tau_grid() -> Vec<f64> {
    let c = SearchControl::default();
    (0..c.grid_points)
        .map(|i| {
            let t = i as f64 / (c.grid_points - 1) as f64;
            10f64.powf(c.log10_lo + t * (c.log10_hi - c.log10_lo))
        })
        .collect()
}

/// The decreasing λ grid the default lasso search scans, anchored at
/// `‖Xᵀy‖_∞` for the given data.
pub fn lambda_grid(data: &RegressionData) -> Vec<f64> {
    let c = LassoSearchControl::default();
    let lmax = lasso_lambda_max(data);
    if lmax == 0.0 {
        return vec![0.0];
    }
    let ratio = c.lambda_min_ratio.powf(1.0 / (c.n_grid - 1) as f64);
    let mut grid = Vec::with_capacity(c.n_grid);
    let mut lambda = lmax;
    for _ in 0..c.n_grid {
        grid.push(lambda);
        lambda *= ratio;
    }
    grid
}

/// Solve the lasso at one penalty, retrying along a warm-started path from
/// `‖Xᵀy‖_∞` if the cold start exhausts its sweep budget.
fn lasso_at(data: &RegressionData, lambda: f64) -> Result<svdshrink::estimators::LassoFit> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(CliError::Validation(format!(
            "lasso penalty must be nonnegative and finite, got {lambda}"
        )));
    }
    match lasso_fit(data, lambda, LASSO_TOL, LASSO_MAX_SWEEPS) {
        Ok(fit) => Ok(fit),
        Err(svdshrink::Error::IterationBudget { .. }) => {
            let lmax = lasso_lambda_max(data);
            if lmax <= lambda {
                return Err(CliError::Numerical(format!(
                    "lasso coordinate descent did not converge at penalty {lambda}"
                )));
            }
            // 20 geometric steps down from the all-zero penalty.
            let steps = 20usize;
            let ratio = (lambda / lmax).powf(1.0 / steps as f64);
            let mut lambdas: Vec<f64> = (0..steps).map(|i| lmax * ratio.powi(i as i32)).collect();
            lambdas.push(lambda);
            let fits = lasso_path(data, &lambdas, LASSO_TOL, LASSO_MAX_SWEEPS)
                .map_err(CliError::from)?;
            Ok(fits.into_iter().last().expect("non-empty path"))
        }
        Err(e) => Err(e.into()),
    }
}

fn assemble_ortho(
    method: Method,
    decomp: &svdshrink::ortho::DesignDecomposition,
    coeffs: &svdshrink::ortho::OrthoCoefficients,
    alpha_tilde: DVector<f64>,
    prior: Prior,
    breakdown: Option<SureBreakdown>,
) -> Result<FittedModel> {
    let beta = reconstruct_beta(&alpha_tilde, decomp)?;
    let fitted = &decomp.u * alpha_tilde.component_mul(&decomp.d);
    Ok(FittedModel {
        method,
        tau: prior.tau(),
        k: prior.k(),
        lambda: None,
        sure_total: breakdown.as_ref().map(|b| b.total),
        breakdown,
        alpha_hat: Some(coeffs.alpha_hat.clone()),
        alpha_tilde: Some(alpha_tilde),
        d: Some(decomp.d.clone()),
        beta,
        fitted,
        nonzero: None,
    })
}

fn assemble_lasso(
    x: &DMatrix<f64>,
    lambda: f64,
    beta: DVector<f64>,
    df: usize,
    sure_total: Option<f64>,
) -> FittedModel {
    let fitted = x * &beta;
    FittedModel {
        method: Method::Lasso,
        tau: None,
        k: None,
        lambda: Some(lambda),
        breakdown: None,
        sure_total,
        alpha_hat: None,
        alpha_tilde: None,
        d: None,
        beta,
        fitted,
        nonzero: Some(df),
    }
}
