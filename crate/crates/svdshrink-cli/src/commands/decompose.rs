//! `decompose`: thin SVD of the design, singular spectrum, rotated OLS.

use std::path::PathBuf;

use svdshrink::ortho::{decompose_design, ols_ortho};

use crate::dataset::{Dataset, MissingPolicy, StandardizeMode};
use crate::error::Result;
use crate::output::{num, opt, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Input CSV file (header row, comma-separated, UTF-8).
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,

    /// Response column: excluded from the design and, when given, reported
    /// as rotated least-squares coefficients per component.
    #[arg(long, value_name = "NAME")]
    pub response: Option<String>,

    /// Missing-value policy (empty fields and "NA" are missing).
    #[arg(long, value_enum, default_value_t = MissingPolicy::DropCols)]
    pub missing: MissingPolicy,

    /// Standardize the response and/or predictors first.
    #[arg(long, value_enum, default_value_t = StandardizeMode::None)]
    pub standardize: StandardizeMode,

    /// Relative singular-value cutoff for the numerical rank
    /// (default: 1e-12 · max(n, p)).
    #[arg(long, value_name = "TOL")]
    pub rank_tol: Option<f64>,

    /// Output CSV file.
    #[arg(long, value_name = "FILE")]
    pub output: PathBuf,
}

pub fn run(args: Args) -> Result<()> {
    let dataset = Dataset::load(
        &args.data,
        args.response.as_deref(),
        args.missing,
        args.standardize,
    )?;
    println!("{}", dataset.report());

    let decomp = decompose_design(&dataset.x, args.rank_tol)?;
    let coeffs = match &dataset.y {
        Some(y) => Some(ols_ortho(&decomp, y)?),
        None => None,
    };

    let total_energy: f64 = decomp.d.iter().map(|d| d * d).sum();
    let mut table = Table::new(vec![
        "component",
        "d",
        "variance_share",
        "alpha_hat",
        "alpha_hat_d",
    ]);
    let mut cumulative = 0.0;
    for i in 0..decomp.m() {
        let d = decomp.d[i];
        cumulative += d * d;
        let alpha_hat = coeffs.as_ref().map(|c| c.alpha_hat[i]);
        table.push(vec![
            (i + 1).to_string(),
            num(d),
            num(cumulative / total_energy),
            opt(alpha_hat.map(num)),
            opt(alpha_hat.map(|a| num(a * d))),
        ]);
    }
    table.write_csv(&args.output)?;

    println!(
        "rank {} retained of min(n, p) = {} (relative cutoff {})",
        decomp.m(),
        decomp.n().min(decomp.p()),
        num(decomp.rank_tol)
    );
    print!("{}", table.render_aligned());
    Ok(())
}
