//! `fit`: fit one method with its parameter chosen by the unbiased risk
//! estimate (needs --sigma) or by k-fold cross-validation.
//!
//! Writes `<output>_summary.csv`, `<output>_coefficients.csv`,
//! `<output>_fitted.csv` and, for the orthogonal-basis families,
//! `<output>_components.csv`.

use std::path::PathBuf;

use clap::ValueEnum;
use svdshrink::rng::{stream_rng, Stream};
use svdshrink::sim::Method;

use crate::cv::{cv_select, fold_assignment};
use crate::dataset::{DataArgs, Dataset};
use crate::error::{CliError, Result};
use crate::model::{fit_at, tune_sure, FittedModel};
use crate::output::{num, opt, Table};

use super::tune::stem_path;

/// How the tuning parameter is selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Tuning {
    /// Minimize the unbiased risk estimate (requires --sigma).
    Sure,
    /// Minimize k-fold cross-validated MSE (no σ needed).
    Cv,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    pub data: DataArgs,

    /// Method: ridge, pcr, gprior, horseshoe or lasso.
    #[arg(long)]
    pub method: Method,

    /// Parameter selection rule.
    #[arg(long, value_enum, default_value_t = Tuning::Sure)]
    pub tuning: Tuning,

    /// Noise standard deviation σ; required for --tuning sure, optional
    /// (enables the risk columns) for --tuning cv.
    #[arg(long, value_name = "SD")]
    pub sigma: Option<f64>,

    /// Cross-validation folds for --tuning cv.
    #[arg(long, value_name = "FOLDS", default_value_t = 5)]
    pub cv_folds: usize,

    /// Seed for the cross-validation fold assignment.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output path stem: writes <stem>_summary.csv, <stem>_coefficients.csv,
    /// <stem>_fitted.csv and (non-lasso) <stem>_components.csv.
    #[arg(long, value_name = "STEM")]
    pub output: PathBuf,
}

pub fn run(args: Args) -> Result<()> {
    let dataset = args.data.load()?;
    println!("{}", dataset.report());
    let y = dataset.require_y()?.clone();

    let (model, cv_mse) = match args.tuning {
        Tuning::Sure => {
            let sigma = args.sigma.ok_or_else(|| {
                CliError::Validation(
                    "tuning by the unbiased risk estimate requires --sigma \
                     (the noise standard deviation); without a trusted σ use --tuning cv"
                        .into(),
                )
            })?;
            (tune_sure(&dataset.x, &y, args.method, sigma)?, None)
        }
        Tuning::Cv => {
            let mut rng = stream_rng(args.seed, Stream::Splits, 0);
            let fold_of = fold_assignment(dataset.n(), args.cv_folds, &mut rng);
            let choice = cv_select(&dataset.x, &y, args.method, &fold_of, args.cv_folds)?;
            let model = fit_at(&dataset.x, &y, args.method, choice.param, args.sigma)?;
            (model, Some(choice.cv_mse))
        }
    };

    write_reports(&args, &dataset, &model, cv_mse)
}

fn write_reports(
    args: &Args,
    dataset: &Dataset,
    model: &FittedModel,
    cv_mse: Option<f64>,
) -> Result<()> {
    let mut summary = Table::new(vec![
        "method",
        "tuning",
        "sigma",
        "tau_star",
        "k_star",
        "lambda_star",
        "sure_total",
        "cv_mse",
        "nonzero",
    ]);
    summary.push(vec![
        model.method.name().to_string(),
        match args.tuning {
            Tuning::Sure => "sure".to_string(),
            Tuning::Cv => "cv".to_string(),
        },
        opt(args.sigma.map(num)),
        opt(model.tau.map(num)),
        opt(model.k),
        opt(model.lambda.map(num)),
        opt(model.sure_total.map(num)),
        opt(cv_mse.map(num)),
        opt(model.nonzero),
    ]);
    summary.write_csv(&stem_path(&args.output, "summary"))?;
    print!("{}", summary.render_aligned());

    let mut coefficients = Table::new(vec!["feature", "beta"]);
    for (name, b) in dataset.feature_names.iter().zip(model.beta.iter()) {
        coefficients.push(vec![name.clone(), num(*b)]);
    }
    coefficients.write_csv(&stem_path(&args.output, "coefficients"))?;

    if let (Some(d), Some(alpha_hat), Some(alpha_tilde)) =
        (&model.d, &model.alpha_hat, &model.alpha_tilde)
    {
        let mut components = Table::new(vec![
            "component",
            "d",
            "alpha_hat",
            "alpha_tilde",
            "sure",
        ]);
        for i in 0..d.len() {
            components.push(vec![
                (i + 1).to_string(),
                num(d[i]),
                num(alpha_hat[i]),
                num(alpha_tilde[i]),
                opt(model
                    .breakdown
                    .as_ref()
                    .map(|b| num(b.per_component[i]))),
            ]);
        }
        components.write_csv(&stem_path(&args.output, "components"))?;
    }

    // Fitted values in working units and mapped back to the original
    // response units (the identity map unless the response was standardized).
    let mut fitted = Table::new(vec!["row", "fitted_working", "fitted_original"]);
    for (i, v) in model.fitted.iter().enumerate() {
        fitted.push(vec![
            (i + 1).to_string(),
            num(*v),
            num(dataset.original_units(*v)),
        ]);
    }
    fitted.write_csv(&stem_path(&args.output, "fitted"))?;
    Ok(())
}
