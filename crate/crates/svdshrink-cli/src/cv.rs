//! K-fold cross-validation tuning for every method.
//!
//! Candidate grids mirror the risk-estimate minimizers — the same τ grid,
//! the full K range, the same geometric λ path — so CV tuning and SURE
//! tuning search the same parameter spaces and differ only in the selection
//! score (pooled out-of-fold squared error instead of the unbiased risk
//! estimate). Ties resolve the same way too: toward smaller τ, smaller K and
//! larger λ.
//!
//! The horseshoe estimator itself needs a noise scale; in CV mode each fit
//! runs at the sample standard deviation of its own fitting responses, a
//! scale-equivariant stand-in that the direct MSE score does not otherwise
//! need.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use svdshrink::estimators::{lasso_fit_warm, ShrinkageSpec, LASSO_MAX_SWEEPS, LASSO_TOL};
use svdshrink::ortho::{decompose_design, ols_ortho, RegressionData};
use svdshrink::sim::Method;

use crate::error::{CliError, Result};
use crate::model::{lambda_grid, prior_for, sample_sd, shrink, tau_grid, Param};

/// CV outcome: the chosen parameter and its pooled out-of-fold MSE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvChoice {
    pub param: Param,
    pub cv_mse: f64,
}

/// Balanced fold labels: a shuffled permutation dealt round-robin.
pub fn fold_assignment(n: usize, folds: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut fold_of = vec![0usize; n];
    for (pos, &i) in perm.iter().enumerate() {
        fold_of[i] = pos % folds;
    }
    fold_of
}

/// Choose a method's tuning parameter by k-fold cross-validation on `(x, y)`
/// with the given fold labels.
pub fn cv_select(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    method: Method,
    fold_of: &[usize],
    folds: usize,
) -> Result<CvChoice> {
    let n = x.nrows();
    if y.len() != n || fold_of.len() != n {
        return Err(CliError::Validation(
            "fold labels must match the number of rows".into(),
        ));
    }
    if folds < 2 || folds > n {
        return Err(CliError::Validation(format!(
            "need 2 ≤ folds ≤ rows, got {folds} folds for {n} rows"
        )));
    }
    for f in 0..folds {
        let held = fold_of.iter().filter(|&&l| l == f).count();
        if held == 0 || n - held < 2 {
            return Err(CliError::Validation(format!(
                "fold {f} leaves {} fitting rows (need ≥ 2) and holds out {held}",
                n - held
            )));
        }
    }
    match method {
        Method::Lasso => cv_lasso(x, y, fold_of, folds),
        Method::Pcr => cv_pcr(x, y, fold_of, folds),
        _ => cv_scale_family(x, y, method, fold_of, folds),
    }
}

/// Rows of `x`/`y` with fold label equal (or not equal) to `f`.
fn split_fold(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    fold_of: &[usize],
    f: usize,
) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>, DVector<f64>) {
    let fit_rows: Vec<usize> = (0..x.nrows()).filter(|&i| fold_of[i] != f).collect();
    let held_rows: Vec<usize> = (0..x.nrows()).filter(|&i| fold_of[i] == f).collect();
    let x_fit = x.select_rows(&fit_rows);
    let y_fit = DVector::from_iterator(fit_rows.len(), fit_rows.iter().map(|&i| y[i]));
    let x_held = x.select_rows(&held_rows);
    let y_held = DVector::from_iterator(held_rows.len(), held_rows.iter().map(|&i| y[i]));
    (x_fit, y_fit, x_held, y_held)
}

fn cv_scale_family(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    method: Method,
    fold_of: &[usize],
    folds: usize,
) -> Result<CvChoice> {
    let family = method.family().expect("scale families only");
    let grid = tau_grid();
    let mut sse = vec![0.0f64; grid.len()];
    for f in 0..folds {
        let (x_fit, y_fit, x_held, y_held) = split_fold(x, y, fold_of, f);
        let decomp = decompose_design(&x_fit, None)?;
        let coeffs = ols_ortho(&decomp, &y_fit)?;
        // Predictions for held-out rows: X_held β = (X_held W) α̃.
        let projector = &x_held * &decomp.w;
        let sigma_ref = if method == Method::Horseshoe {
            let sd = sample_sd(&y_fit);
            if sd == 0.0 {
                return Err(CliError::Validation(
                    "responses are constant within a cross-validation fold; \
                     supply --sigma and use --tuning sure"
                        .into(),
                ));
            }
            sd
        } else {
            1.0
        };
        for (ti, &tau) in grid.iter().enumerate() {
            let spec = ShrinkageSpec::new(prior_for(family, tau), sigma_ref)?;
            let alpha_tilde = shrink(&coeffs, &spec)?;
            let pred = &projector * &alpha_tilde;
            sse[ti] += (&y_held - pred).norm_squared();
        }
    }
    let ti = argmin(&sse);
    Ok(CvChoice {
        param: Param::Tau(grid[ti]),
        cv_mse: sse[ti] / x.nrows() as f64,
    })
}

fn cv_pcr(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    fold_of: &[usize],
    folds: usize,
) -> Result<CvChoice> {
    // Candidate cutoffs are limited by the smallest fold-fit rank.
    let mut per_fold: Vec<(DVector<f64>, DMatrix<f64>, DVector<f64>)> = Vec::new();
    let mut k_max = usize::MAX;
    for f in 0..folds {
        let (x_fit, y_fit, x_held, y_held) = split_fold(x, y, fold_of, f);
        let decomp = decompose_design(&x_fit, None)?;
        let coeffs = ols_ortho(&decomp, &y_fit)?;
        k_max = k_max.min(decomp.m());
        let projector = &x_held * &decomp.w;
        per_fold.push((coeffs.alpha_hat, projector, y_held));
    }
    let mut sse = vec![0.0f64; k_max + 1];
    for (alpha_hat, projector, y_held) in &per_fold {
        // Cutoff K keeps the leading K rotated coefficients; build the
        // prediction incrementally, one component at a time.
        let mut pred = DVector::zeros(y_held.len());
        sse[0] += (y_held - &pred).norm_squared();
        for k in 1..=k_max {
            pred += projector.column(k - 1) * alpha_hat[k - 1];
            sse[k] += (y_held - &pred).norm_squared();
        }
    }
    let k = argmin(&sse);
    Ok(CvChoice {
        param: Param::K(k),
        cv_mse: sse[k] / x.nrows() as f64,
    })
}

fn cv_lasso(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    fold_of: &[usize],
    folds: usize,
) -> Result<CvChoice> {
    let data = RegressionData::new(x.clone(), y.clone())?;
    let grid = lambda_grid(&data);
    let mut sse = vec![0.0f64; grid.len()];
    // Number of λ values every fold completed; budget exhaustion truncates
    // the usable path (matching the risk-estimate search's behavior).
    let mut completed = grid.len();
    for f in 0..folds {
        let (x_fit, y_fit, x_held, y_held) = split_fold(x, y, fold_of, f);
        let data_fit = RegressionData::new(x_fit, y_fit)?;
        let mut warm = DVector::zeros(data_fit.p());
        for (li, &lambda) in grid.iter().enumerate().take(completed) {
            let fit = match lasso_fit_warm(&data_fit, lambda, LASSO_TOL, LASSO_MAX_SWEEPS, warm.clone())
            {
                Ok(fit) => fit,
                Err(svdshrink::Error::IterationBudget { .. }) if li > 0 => {
                    completed = li;
                    break;
                }
                Err(e) => return Err(e.into()),
            };
            warm = fit.beta.clone();
            let pred = &x_held * &fit.beta;
            sse[li] += (&y_held - pred).norm_squared();
        }
    }
    let li = argmin(&sse[..completed]);
    Ok(CvChoice {
        param: Param::Lambda(grid[li]),
        cv_mse: sse[li] / x.nrows() as f64,
    })
}

/// Index of the smallest value; first wins on exact ties.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0usize;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}
