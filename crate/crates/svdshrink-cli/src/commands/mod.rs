//! The seven subcommands: argument structs and runners.

pub mod decompose;
pub mod evaluate;
pub mod fit;
pub mod risk_mc;
pub mod simulate;
pub mod sure;
pub mod tune;

use clap::Subcommand;

use crate::error::Result;

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose a design matrix and report its singular spectrum (and, with
    /// --response, the rotated least-squares coefficients).
    Decompose(decompose::Args),
    /// Fit one method with its tuning parameter chosen by the unbiased risk
    /// estimate or by cross-validation.
    Fit(fit::Args),
    /// Compare methods by prediction MSE over repeated train/test splits.
    Evaluate(evaluate::Args),
    /// Evaluate the componentwise unbiased risk estimate at a fixed
    /// parameter (figure-ready CSV).
    Sure(sure::Args),
    /// Search for the risk-estimate-minimizing tuning parameter.
    Tune(tune::Args),
    /// Run seeded simulation experiments from a config file.
    Simulate(simulate::Args),
    /// Estimate frequentist risk by Monte Carlo in the rotated model.
    RiskMc(risk_mc::Args),
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Decompose(args) => decompose::run(args),
        Command::Fit(args) => fit::run(args),
        Command::Evaluate(args) => evaluate::run(args),
        Command::Sure(args) => sure::run(args),
        Command::Tune(args) => tune::run(args),
        Command::Simulate(args) => simulate::run(args),
        Command::RiskMc(args) => risk_mc::run(args),
    }
}
