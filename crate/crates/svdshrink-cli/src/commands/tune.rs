//! `tune`: search for the risk-estimate-minimizing tuning parameter.
//!
//! Writes `<output>_summary.csv` and, for the orthogonal-basis families,
//! `<output>_components.csv` with the componentwise estimate at the optimum.

use std::path::PathBuf;

use svdshrink::sim::Method;

use crate::dataset::DataArgs;
use crate::error::Result;
use crate::model::{tune_sure, FittedModel};
use crate::output::{num, opt, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    pub data: DataArgs,

    /// Method: ridge, pcr, gprior, horseshoe or lasso.
    #[arg(long)]
    pub method: Method,

    /// Noise standard deviation σ (the risk estimate needs it).
    #[arg(long, value_name = "SD")]
    pub sigma: f64,

    /// Output path stem: writes <stem>_summary.csv and (non-lasso)
    /// <stem>_components.csv.
    #[arg(long, value_name = "STEM")]
    pub output: PathBuf,
}

pub fn run(args: Args) -> Result<()> {
    let dataset = args.data.load()?;
    println!("{}", dataset.report());
    let y = dataset.require_y()?;

    let model = tune_sure(&dataset.x, y, args.method, args.sigma)?;

    let summary = summary_table(&model, args.sigma);
    summary.write_csv(&stem_path(&args.output, "summary"))?;
    print!("{}", summary.render_aligned());

    if let Some(breakdown) = &model.breakdown {
        let d = model.d.as_ref().expect("orthogonal-basis method");
        let alpha_hat = model.alpha_hat.as_ref().expect("orthogonal-basis method");
        let mut table = Table::new(vec!["component", "d", "alpha_hat_d", "sure", "family"]);
        for i in 0..d.len() {
            table.push(vec![
                (i + 1).to_string(),
                num(d[i]),
                num(alpha_hat[i] * d[i]),
                num(breakdown.per_component[i]),
                model.method.name().to_string(),
            ]);
        }
        table.write_csv(&stem_path(&args.output, "components"))?;
    }
    Ok(())
}

/// `<stem>_<suffix>.csv` next to the requested output stem.
pub fn stem_path(stem: &PathBuf, suffix: &str) -> PathBuf {
    let mut name = stem
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push('_');
    name.push_str(suffix);
    name.push_str(".csv");
    stem.with_file_name(name)
}

/// One-row summary of a fitted model.
pub fn summary_table(model: &FittedModel, sigma: f64) -> Table {
    let mut t = Table::new(vec![
        "method",
        "sigma",
        "tau_star",
        "k_star",
        "lambda_star",
        "sure_total",
        "nonzero",
    ]);
    t.push(vec![
        model.method.name().to_string(),
        num(sigma),
        opt(model.tau.map(num)),
        opt(model.k),
        opt(model.lambda.map(num)),
        opt(model.sure_total.map(num)),
        opt(model.nonzero),
    ]);
    t
}
