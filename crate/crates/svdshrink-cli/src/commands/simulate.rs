//! `simulate`: run seeded experiments from a TOML config file.
//!
//! The config is either a single experiment at top level or a list of
//! `[[experiment]]` tables; each table maps one-to-one onto the library's
//! experiment configuration (see `simulate --help` and the repository
//! README for the schema). Results land in the output directory:
//! `summary.csv` with one row per (setting, method), plus per-method
//! componentwise risk profiles `<setting>_<method>_profile.csv`.

use std::path::{Path, PathBuf};

use svdshrink::sim::{component_sure_profile, run_experiment, ExperimentResult, SimConfig};

use crate::error::{CliError, Result};
use crate::output::{num, opt, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// TOML config file: one experiment at top level, or repeated
    /// [[experiment]] tables (each may carry an optional `name`).
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,

    /// Output directory (created if absent).
    #[arg(long, value_name = "DIR")]
    pub output: PathBuf,
}

pub fn run(args: Args) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.config.display())))?;
    let experiments = parse_config(&text)?;
    std::fs::create_dir_all(&args.output)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.output.display())))?;

    let mut summary = Table::new(vec![
        "setting",
        "method",
        "sure_total",
        "mean_sse",
        "sd_sse",
        "tau_star",
        "k_star",
        "lambda_star",
    ]);
    for (label, config) in &experiments {
        let result = run_experiment(config)?;
        append_summary(&mut summary, label, &result);
        write_profiles(&args.output, label, config, &result)?;
    }
    summary.write_csv(&args.output.join("summary.csv"))?;
    print!("{}", summary.render_aligned());
    Ok(())
}

/// Parse the config text into labeled experiment configurations.
fn parse_config(text: &str) -> Result<Vec<(String, SimConfig)>> {
    let table: toml::Table = text.parse().map_err(CliError::from)?;
    let mut out = Vec::new();
    if let Some(experiments) = table.get("experiment") {
        if table.len() > 1 {
            let extras: Vec<&str> = table
                .keys()
                .filter(|k| k.as_str() != "experiment")
                .map(String::as_str)
                .collect();
            return Err(CliError::Validation(format!(
                "config file: keys {extras:?} are not allowed next to [[experiment]] tables"
            )));
        }
        let toml::Value::Array(items) = experiments else {
            return Err(CliError::Validation(
                "config file: 'experiment' must be a list of [[experiment]] tables".into(),
            ));
        };
        if items.is_empty() {
            return Err(CliError::Validation(
                "config file: no [[experiment]] tables".into(),
            ));
        }
        for (i, item) in items.iter().enumerate() {
            let toml::Value::Table(mut entry) = item.clone() else {
                return Err(CliError::Validation(format!(
                    "config file: experiment {} is not a table",
                    i + 1
                )));
            };
            let label = match entry.remove("name") {
                Some(toml::Value::String(name)) => validate_label(&name)?,
                Some(_) => {
                    return Err(CliError::Validation(format!(
                        "config file: experiment {}: 'name' must be a string",
                        i + 1
                    )))
                }
                None => format!("setting{}", i + 1),
            };
            let config: SimConfig = toml::Value::Table(entry)
                .try_into()
                .map_err(|e: toml::de::Error| {
                    CliError::Validation(format!(
                        "config file: experiment {} ('{}'): {}",
                        i + 1,
                        label,
                        e.message()
                    ))
                })?;
            config.validate().map_err(CliError::from)?;
            out.push((label, config));
        }
    } else {
        let config: SimConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| {
                CliError::Validation(format!("config file: {}", e.message()))
            })?;
        config.validate().map_err(CliError::from)?;
        out.push(("setting1".to_string(), config));
    }
    let mut labels: Vec<&str> = out.iter().map(|(l, _)| l.as_str()).collect();
    labels.sort_unstable();
    if labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Validation(
            "config file: experiment names must be unique".into(),
        ));
    }
    Ok(out)
}

/// Experiment names become file names; keep them portable.
fn validate_label(name: &str) -> Result<String> {
    if name.is_empty()
        || !name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        return Err(CliError::Validation(format!(
            "config file: experiment name '{name}' must be nonempty and use only \
             letters, digits, '_' or '-'"
        )));
    }
    Ok(name.to_string())
}

fn append_summary(summary: &mut Table, label: &str, result: &ExperimentResult) {
    for s in &result.summaries {
        summary.push(vec![
            label.to_string(),
            s.method.name().to_string(),
            num(s.sure_total),
            num(s.mean_sse),
            num(s.sd_sse),
            opt(s.tau_star.map(num)),
            opt(s.k_star),
            opt(s.lambda_star.map(num)),
        ]);
    }
}

fn write_profiles(
    dir: &Path,
    label: &str,
    config: &SimConfig,
    result: &ExperimentResult,
) -> Result<()> {
    for &method in &config.methods {
        if method.family().is_none() {
            continue; // no componentwise risk decomposition
        }
        let rows = component_sure_profile(result, method)?;
        let mut table = Table::new(vec!["component", "d", "alpha_hat_d", "sure", "family"]);
        for row in rows {
            table.push(vec![
                row.component.to_string(),
                num(row.d),
                num(row.alpha_hat_d),
                num(row.sure),
                method.name().to_string(),
            ]);
        }
        table.write_csv(&dir.join(format!("{label}_{}_profile.csv", method.name())))?;
    }
    Ok(())
}
