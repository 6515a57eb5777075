//! `diagkill`: verify, classify and generate Killing fields of diagonal
//! metrics on R³.
//!
//! Exit codes: 0 pass, 1 verified negative, 2 operational error.

mod commands;
mod report;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use report::Report;
use spec::Overrides;

#[derive(Parser, Debug)]
#[command(
    name = "diagkill",
    version,
    about = "Killing vector fields of diagonal metrics on R^3"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// Sample grid n1,n2,n3 (overrides the spec)
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<[usize; 3]>,
    /// Residual tolerance (overrides the spec)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Cube domain a,b, i.e. [a,b]^3 (overrides the spec)
    #[arg(long, global = true, value_parser = parse_domain, allow_hyphen_values = true)]
    domain: Option<(f64, f64)>,
    /// Relative tolerance of the constancy tests used by the classifier
    #[arg(long, global = true)]
    constancy: Option<f64>,
    /// Emit the report as JSON
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a field against both residual oracles on the grid
    Verify { spec: PathBuf },
    /// Classify the metric into a solved regime
    Classify { spec: PathBuf },
    /// Generate Killing fields of a family, self-verified
    Generate {
        spec: PathBuf,
        /// Family tag, e.g. TE1_IV, SPLIT_X1X2K3, CONST_METRIC
        #[arg(long)]
        family: String,
        /// Parameters: positional `1,0,2` or named `c1=1,c3=2` (others 0)
        #[arg(long, allow_hyphen_values = true, conflicts_with = "basis")]
        params: Option<String>,
        /// Emit one field per unit parameter vector
        #[arg(long)]
        basis: bool,
    },
    /// Verify the bundled reference examples
    #[command(alias = "examples")]
    PaperExamples,
    /// Isometry defect of the time-t flow at the grid's interior points
    FlowCheck {
        spec: PathBuf,
        #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Largest acceptable defect
        #[arg(long, default_value_t = 1e-5)]
        flow_tol: f64,
    },
}

fn parse_grid(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let nums: Vec<usize> = parts
        .iter()
        .map(|p| p.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    match nums[..] {
        [n] if n >= 2 => Ok([n; 3]),
        [a, b, c] if a >= 2 && b >= 2 && c >= 2 => Ok([a, b, c]),
        _ => Err("expected n or n1,n2,n3 with every count at least 2".into()),
    }
}

fn parse_domain(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected a,b")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(a < b) {
        return Err("expected a < b".into());
    }
    Ok((a, b))
}

/// Outcome of a command: the report and whether it is a positive result.
pub struct Outcome {
    pub report: Report,
    pub pass: bool,
}

fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    if let Some(t) = g.tol {
        if !(t > 0.0) {
            bail!("--tol must be positive");
        }
    }
    let overrides = Overrides {
        grid: g.grid,
        tol: g.tol,
        domain: g.domain,
        constancy: g.constancy,
    };
    match &cli.command {
        Command::Verify { spec } => commands::verify(spec, &overrides),
        Command::Classify { spec } => commands::classify(spec, &overrides),
        Command::Generate {
            spec,
            family,
            params,
            basis,
        } => commands::generate(spec, &overrides, family, params.as_deref(), *basis),
        Command::PaperExamples => commands::paper_examples(&overrides),
        Command::FlowCheck {
            spec,
            t,
            steps,
            flow_tol,
        } => commands::flow_check(spec, &overrides, *t, *steps, *flow_tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(Outcome { mut report, pass }) => {
            report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            if cli.global.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
