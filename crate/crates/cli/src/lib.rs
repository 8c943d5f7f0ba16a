//! Command-line pipeline driver: JSON config in, one directory of deterministic outputs per run.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

pub use config::{Overrides, Resolved, RunConfig};
pub use error::CliError;
use output::{Header, OutDir};

#[derive(Debug, Parser)]
#[command(name = "exact-wkb", version, about = "Exact WKB analysis pipeline")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Comma-separated ħ samples; `re:im` for complex values.
    #[arg(long, allow_hyphen_values = true)]
    pub hbar: Option<String>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long = "xi-max")]
    pub xi_max: Option<f64>,
    #[arg(long = "xi-n")]
    pub xi_n: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact formal coefficients, Riccati residual and Gevrey probe.
    Formal(RunArgs),
    /// Trace WKB trajectories through x0 for each configured direction.
    Trace(RunArgs),
    /// Borel functions and resummed solutions along the configured segment.
    Resum(RunArgs),
    /// Check resummed solutions against the independent oracles.
    Validate(RunArgs),
    /// Built-in problem catalog.
    Problems {
        #[command(subcommand)]
        action: ProblemsAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ProblemsAction {
    /// Print the catalog as JSON.
    List,
}

pub fn parse_hbar_list(text: &str) -> Result<Vec<Complex64>, CliError> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            let bad = || CliError::Config(format!("cannot parse --hbar value `{item}`"));
            match item.split_once(':') {
                Some((a, b)) => Ok(Complex64::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)),
                None => Ok(Complex64::new(item.parse().map_err(|_| bad())?, 0.0)),
            }
        })
        .collect()
}

impl RunArgs {
    pub fn overrides(&self) -> Result<Overrides, CliError> {
        Ok(Overrides {
            theta: self.theta,
            hbar: self.hbar.as_deref().map(parse_hbar_list).transpose()?,
            order: self.order,
            xi_max: self.xi_max,
            xi_n: self.xi_n,
        })
    }
}

/// Executes one subcommand; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("exact-wkb: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (name, args) = match &cli.command {
        Command::Problems { action: ProblemsAction::List } => {
            let text = serde_json::to_string_pretty(&commands::problems_list()).expect("catalog serializes");
            let _ = writeln!(std::io::stdout(), "{text}");
            return Ok(());
        }
        Command::Formal(a) => ("formal", a),
        Command::Trace(a) => ("trace", a),
        Command::Resum(a) => ("resum", a),
        Command::Validate(a) => ("validate", a),
    };
    let cfg = config::resolve(&config::load(&args.config)?, &args.overrides()?)?;
    let mut out = OutDir::create(&args.out, Header::new(name, cfg.hash()))?;
    let result = match name {
        "formal" => commands::formal(&cfg, &mut out),
        "trace" => commands::trace(&cfg, &mut out),
        "resum" => commands::resum(&cfg, &mut out),
        _ => commands::validate(&cfg, &mut out).and_then(|checks| {
            let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Acceptance(failed.join(", ")))
            }
        }),
    };
    if let Err(e) = &result {
        if !out.written.iter().any(|f| f == "report.json") {
            out.json("report.json", &json!({ "problem": cfg.problem_name, "error": e.to_string(), "exit_code": e.exit_code() }))?;
        }
    }
    result
}
