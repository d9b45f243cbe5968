//! `evaluate`: compare methods by out-of-sample prediction MSE over repeated
//! random train/test splits, with per-method win counts.
//!
//! Each repeat splits the rows once, tunes every requested method on the
//! training part (fold assignment is drawn before the method loop, so
//! results do not depend on method order and duplicate entries give
//! identical columns), and scores squared prediction error on the held-out
//! part in working units. Writes `<output>_summary.csv` and
//! `<output>_repeats.csv`.

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use svdshrink::rng::{stream_rng, Stream};
use svdshrink::sim::Method;

use crate::cv::{cv_select, fold_assignment};
use crate::dataset::DataArgs;
use crate::error::{CliError, Result};
use crate::model::{fit_at, tune_sure, FittedModel};
use crate::output::{num, opt, Table};

use super::fit::Tuning;
use super::tune::stem_path;

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    pub data: DataArgs,

    /// Comma-separated methods to compare (ridge, pcr, gprior, horseshoe,
    /// lasso); entries may repeat.
    #[arg(long, value_delimiter = ',', required = true)]
    pub methods: Vec<Method>,

    /// Fraction of rows used for training in each split.
    #[arg(long, value_name = "FRAC", default_value_t = 0.75)]
    pub train_frac: f64,

    /// Number of random train/test splits.
    #[arg(long, value_name = "COUNT", default_value_t = 20)]
    pub repeats: usize,

    /// Parameter selection rule on each training split.
    #[arg(long, value_enum, default_value_t = Tuning::Cv)]
    pub tuning: Tuning,

    /// Noise standard deviation σ; required for --tuning sure.
    #[arg(long, value_name = "SD")]
    pub sigma: Option<f64>,

    /// Cross-validation folds within each training split.
    #[arg(long, value_name = "FOLDS", default_value_t = 5)]
    pub cv_folds: usize,

    /// Seed for the split and fold streams.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output path stem: writes <stem>_summary.csv and <stem>_repeats.csv.
    #[arg(long, value_name = "STEM")]
    pub output: PathBuf,
}

pub fn run(args: Args) -> Result<()> {
    if !(args.train_frac > 0.0 && args.train_frac < 1.0) {
        return Err(CliError::Validation(format!(
            "--train-frac must lie strictly between 0 and 1, got {}",
            args.train_frac
        )));
    }
    if args.repeats == 0 {
        return Err(CliError::Validation("--repeats must be at least 1".into()));
    }
    if args.methods.is_empty() {
        return Err(CliError::Validation("--methods must name at least one method".into()));
    }
    let sigma = match args.tuning {
        Tuning::Sure => Some(args.sigma.ok_or_else(|| {
            CliError::Validation(
                "tuning by the unbiased risk estimate requires --sigma; \
                 without a trusted σ use --tuning cv"
                    .into(),
            )
        })?),
        Tuning::Cv => args.sigma,
    };

    let dataset = args.data.load()?;
    println!("{}", dataset.report());
    let y = dataset.require_y()?.clone();
    let n = dataset.n();
    let n_train = ((args.train_frac * n as f64).round() as usize).clamp(1, n - 1);
    let n_test = n - n_train;

    let mut mses: Vec<Vec<f64>> = vec![Vec::with_capacity(args.repeats); args.methods.len()];
    let mut repeats_table = Table::new(vec![
        "repeat", "method", "mse", "tau", "k", "lambda",
    ]);
    for repeat in 0..args.repeats {
        let mut rng = stream_rng(args.seed, Stream::Splits, repeat as u64);
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let mut train_rows = perm[..n_train].to_vec();
        let mut test_rows = perm[n_train..].to_vec();
        train_rows.sort_unstable();
        test_rows.sort_unstable();
        let x_train = dataset.x.select_rows(&train_rows);
        let y_train = DVector::from_iterator(n_train, train_rows.iter().map(|&i| y[i]));
        let x_test = dataset.x.select_rows(&test_rows);
        let y_test = DVector::from_iterator(n_test, test_rows.iter().map(|&i| y[i]));
        // One fold assignment per repeat, shared by all methods.
        let fold_of = fold_assignment(n_train, args.cv_folds, &mut rng);

        for (mi, &method) in args.methods.iter().enumerate() {
            let model = fit_on_split(&args, method, &x_train, &y_train, &fold_of, sigma)?;
            let mse = (&y_test - model.predict(&x_test)).norm_squared() / n_test as f64;
            mses[mi].push(mse);
            repeats_table.push(vec![
                (repeat + 1).to_string(),
                method.name().to_string(),
                num(mse),
                opt(model.tau.map(num)),
                opt(model.k),
                opt(model.lambda.map(num)),
            ]);
        }
    }

    // Win counts: every method attaining a repeat's minimum MSE gets the win.
    let mut wins = vec![0usize; args.methods.len()];
    for r in 0..args.repeats {
        let best = mses
            .iter()
            .map(|col| col[r])
            .fold(f64::INFINITY, f64::min);
        for (mi, col) in mses.iter().enumerate() {
            if col[r] == best {
                wins[mi] += 1;
            }
        }
    }

    let mut summary = Table::new(vec!["method", "mean_mse", "sd_mse", "wins"]);
    for (mi, method) in args.methods.iter().enumerate() {
        let col = &mses[mi];
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        let sd = if col.len() > 1 {
            (col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (col.len() - 1) as f64)
                .sqrt()
        } else {
            0.0
        };
        summary.push(vec![
            method.name().to_string(),
            num(mean),
            num(sd),
            wins[mi].to_string(),
        ]);
    }
    summary.write_csv(&stem_path(&args.output, "summary"))?;
    repeats_table.write_csv(&stem_path(&args.output, "repeats"))?;

    println!(
        "{} repeats, {} training rows, {} test rows, MSE in working units",
        args.repeats, n_train, n_test
    );
    print!("{}", summary.render_aligned());
    Ok(())
}

fn fit_on_split(
    args: &Args,
    method: Method,
    x_train: &DMatrix<f64>,
    y_train: &DVector<f64>,
    fold_of: &[usize],
    sigma: Option<f64>,
) -> Result<FittedModel> {
    match args.tuning {
        Tuning::Sure => tune_sure(x_train, y_train, method, sigma.expect("validated")),
        Tuning::Cv => {
            let choice = cv_select(x_train, y_train, method, fold_of, args.cv_folds)?;
            fit_at(x_train, y_train, method, choice.param, sigma)
        }
    }
}
