use std::io::Write;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use crate::{CliError, CliResult};

pub mod bounds;
pub mod curves;
pub mod fit;
pub mod measures;
pub mod reproduce;

/// Dispersion indices for inaccuracy and Kullback-Leibler divergence.
#[derive(Debug, Parser)]
#[command(name = "infodisp", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy, inaccuracy and divergence measures with their variances.
    Measures(measures::MeasuresArgs),
    /// I and VarI along a parameter grid (CSV).
    Curves(curves::CurvesArgs),
    /// Chebyshev lower bounds for VarI (CSV, or one row for an explicit pair).
    Bounds(bounds::BoundsArgs),
    /// Fit candidates to data and rank them against a reference estimate.
    Fit(fit::FitArgs),
    /// Recompute published values and compare.
    Reproduce(reproduce::ReproduceArgs),
}

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Measures(a) => measures::run(&a, out),
        Command::Curves(a) => curves::run(&a, out),
        Command::Bounds(a) => bounds::run(&a, out),
        Command::Fit(a) => fit::run(&a, out),
        Command::Reproduce(a) => reproduce::run(&a, out),
    }
}

/// Two-density families with a closed-form table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pair {
    /// f = Exp(lambda), g = Exp(eta); the grid runs over eta.
    Exp,
    /// f = U(0,1), g = Power(alpha); the grid runs over alpha.
    Power,
}

/// `lo:hi:step`, inclusive of `hi` up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected lo:hi:step, got '{s}'"));
        }
        let mut v = [0.0; 3];
        for (i, p) in parts.iter().enumerate() {
            v[i] = p
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("'{p}' (field {} of '{s}') is not a finite number", i + 1))?;
        }
        let [lo, hi, step] = v;
        if !(lo > 0.0) {
            return Err(format!("grid must start above 0, got {lo}"));
        }
        if hi < lo {
            return Err(format!("grid end {hi} is below its start {lo}"));
        }
        if !(step > 0.0) {
            return Err(format!("grid step must be > 0, got {step}"));
        }
        if (hi - lo) / step > 1e6 {
            return Err("grid has more than a million points".into());
        }
        Ok(Grid { lo, hi, step })
    }
}

pub(crate) fn positive_list(name: &str, v: &[f64]) -> CliResult<()> {
    if v.is_empty() {
        return Err(CliError::usage(format!("--{name} needs at least one value")));
    }
    match v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        Some(x) => Err(CliError::usage(format!("--{name} values must be finite and > 0, got {x}"))),
        None => Ok(()),
    }
}
