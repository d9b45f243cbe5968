//! `sure`: componentwise unbiased risk estimate at a fixed parameter,
//! emitted as a figure-ready tidy CSV (component, d, alpha_hat_d, sure,
//! family).

use std::path::PathBuf;

use svdshrink::sim::Method;

use crate::dataset::DataArgs;
use crate::error::{CliError, Result};
use crate::model::{fit_at, Param};
use crate::output::{num, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    pub data: DataArgs,

    /// Method: ridge, pcr, gprior or horseshoe (the lasso risk estimate has
    /// no per-component decomposition; use `tune` for its total).
    #[arg(long)]
    pub method: Method,

    /// Noise standard deviation σ.
    #[arg(long, value_name = "SD")]
    pub sigma: f64,

    /// Prior scale τ (ridge, gprior, horseshoe).
    #[arg(long, value_name = "SCALE")]
    pub tau: Option<f64>,

    /// Component cutoff K (pcr).
    #[arg(long, value_name = "COUNT")]
    pub k: Option<usize>,

    /// Output CSV file.
    #[arg(long, value_name = "FILE")]
    pub output: PathBuf,
}

pub fn run(args: Args) -> Result<()> {
    let param = param_for(&args)?;
    let dataset = args.data.load()?;
    println!("{}", dataset.report());
    let y = dataset.require_y()?;

    let model = fit_at(&dataset.x, y, args.method, param, Some(args.sigma))?;
    let breakdown = model.breakdown.as_ref().expect("σ was supplied");
    let d = model.d.as_ref().expect("orthogonal-basis method");
    let alpha_hat = model.alpha_hat.as_ref().expect("orthogonal-basis method");

    let mut table = Table::new(vec!["component", "d", "alpha_hat_d", "sure", "family"]);
    for i in 0..d.len() {
        table.push(vec![
            (i + 1).to_string(),
            num(d[i]),
            num(alpha_hat[i] * d[i]),
            num(breakdown.per_component[i]),
            args.method.name().to_string(),
        ]);
    }
    table.write_csv(&args.output)?;

    println!(
        "total SURE = {} ({}, {}, sigma = {})",
        num(breakdown.total),
        args.method,
        match param {
            Param::Tau(t) => format!("tau = {}", num(t)),
            Param::K(k) => format!("K = {k}"),
            Param::Lambda(l) => format!("lambda = {}", num(l)),
        },
        num(args.sigma)
    );
    print!("{}", table.render_aligned());
    Ok(())
}

fn param_for(args: &Args) -> Result<Param> {
    match args.method {
        Method::Lasso => Err(CliError::Validation(
            "the lasso risk estimate has no per-component decomposition; \
             use `tune --method lasso` for its total"
                .into(),
        )),
        Method::Pcr => match (args.k, args.tau) {
            (Some(k), None) => Ok(Param::K(k)),
            _ => Err(CliError::Validation(
                "pcr takes --k (and no --tau)".into(),
            )),
        },
        _ => match (args.tau, args.k) {
            (Some(tau), None) => Ok(Param::Tau(tau)),
            _ => Err(CliError::Validation(format!(
                "{} takes --tau (and no --k)",
                args.method
            ))),
        },
    }
}
