//! `gapwave`: batch experiments over the sign-change laboratory.
//!
//! Every run writes `summary.json` (schema `gapwave/1`) and CSV data into the
//! output directory, plus SVG plots with `--svg`. Exit status is 0 when every
//! asserted invariant holds, 1 otherwise (with `failures.json`), 2 on an
//! invalid configuration.

mod config;
mod experiments;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toml::Value;

use config::{ConfigError, ConfigFile, ExperimentConfig, Kind};
use experiments::RunError;

#[derive(Parser)]
#[command(version, about = "Sign changes of signals with spectral gaps")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Window length (radius for density/heat, half-width for example1, r_max for example2)
    #[arg(long, global = true)]
    window: Option<f64>,

    /// Sample spacing
    #[arg(long, global = true)]
    dx: Option<f64>,

    /// Print the JSON summary to stdout
    #[arg(long, global = true)]
    json: bool,

    /// Also write SVG plots
    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Args, Default)]
struct PolyArgs {
    /// Gap half-width a
    #[arg(long)]
    gap: Option<f64>,
    /// Highest frequency
    #[arg(long)]
    band: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Sign changes per period against twice the gap order
    Sturm {
        /// Gap orders, e.g. 1..8
        #[arg(long)]
        m_range: Option<String>,
        #[arg(long)]
        trials: Option<u32>,
        #[arg(long)]
        max_degree: Option<u32>,
    },
    /// Sign-change density s(r)/r of random high-pass polynomials
    Density {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        trials: Option<u32>,
    },
    /// Sign-change count under the heat flow
    Heat {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        steps: Option<u32>,
    },
    /// Analytic decomposition, phase curve and decay
    Decompose {
        #[command(flatten)]
        poly: PolyArgs,
    },
    /// Zero-free intervals for a signal with a gap
    Example1 {
        /// Integer intervals, e.g. 10-13,40-46
        #[arg(long)]
        intervals: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Gap shrinkage in units of π
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Integer zero set with scheduled density
    Example2 {
        #[arg(long)]
        k: Option<f64>,
    },
    /// Every experiment with default parameters, one subdirectory each
    All,
    /// The experiment named by `kind` in the config file
    Run,
}

fn push<T: Into<Value>>(v: &mut Vec<(&'static str, Value)>, key: &'static str, x: Option<T>) {
    if let Some(x) = x {
        v.push((key, x.into()));
    }
}

fn poly_overrides(v: &mut Vec<(&'static str, Value)>, p: PolyArgs) {
    push(v, "gap", p.gap);
    push(v, "band", p.band.map(i64::from));
}

/// Kind and flag overrides for a single-experiment command.
fn overrides(cli: &Cli, command: Command) -> (Option<Kind>, Vec<(&'static str, Value)>) {
    let mut v = Vec::new();
    let kind = match command {
        Command::Sturm {
            m_range,
            trials,
            max_degree,
        } => {
            push(&mut v, "m_range", m_range);
            push(&mut v, "trials", trials.map(i64::from));
            push(&mut v, "max_degree", max_degree.map(i64::from));
            Some(Kind::Sturm)
        }
        Command::Density { poly, trials } => {
            poly_overrides(&mut v, poly);
            push(&mut v, "trials", trials.map(i64::from));
            Some(Kind::Density)
        }
        Command::Heat { poly, t_max, steps } => {
            poly_overrides(&mut v, poly);
            push(&mut v, "t_max", t_max);
            push(&mut v, "steps", steps.map(i64::from));
            Some(Kind::Heat)
        }
        Command::Decompose { poly } => {
            poly_overrides(&mut v, poly);
            Some(Kind::Decompose)
        }
        Command::Example1 {
            intervals,
            alpha,
            epsilon,
        } => {
            push(&mut v, "intervals", intervals);
            push(&mut v, "alpha", alpha);
            push(&mut v, "epsilon", epsilon);
            Some(Kind::Example1)
        }
        Command::Example2 { k } => {
            push(&mut v, "k", k);
            Some(Kind::Example2)
        }
        Command::All | Command::Run => None,
    };
    if let Some(kind) = kind {
        if kind.keys().contains(&"window") {
            push(&mut v, "window", cli.window);
        }
        if kind.keys().contains(&"dx") {
            push(&mut v, "dx", cli.dx);
        }
    }
    (kind, v)
}

enum Status {
    Pass,
    Fail,
    Invalid,
}

fn execute(cfg: &ExperimentConfig, cli: &Cli) -> Status {
    match experiments::run(cfg, cli.svg) {
        Ok(out) => match report::write_reports(cfg, &out) {
            Ok(summary) => {
                if cli.json {
                    println!("{}", serde_json::to_string_pretty(&summary).unwrap_or_default());
                } else {
                    let failed: Vec<&str> = out.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
                    let verdict = if failed.is_empty() {
                        "PASS".to_string()
                    } else {
                        format!("FAIL ({})", failed.join("; "))
                    };
                    println!("{:<10} {verdict} -> {}", cfg.kind.name(), cfg.output_dir.display());
                }
                if out.pass() {
                    Status::Pass
                } else {
                    Status::Fail
                }
            }
            Err(e) => {
                eprintln!("{}: writing reports: {e:#}", cfg.kind);
                Status::Fail
            }
        },
        Err(RunError::Config(e)) => {
            eprintln!("{}: {e}", cfg.kind);
            Status::Invalid
        }
        Err(RunError::Failed(e)) => {
            eprintln!("{}: {e:#}", cfg.kind);
            if let Err(w) = report::write_error(cfg, &format!("{e:#}")) {
                eprintln!("{}: writing failure record: {w:#}", cfg.kind);
            }
            Status::Fail
        }
    }
}

fn configs(cli: &mut Cli) -> Result<Vec<ExperimentConfig>, ConfigError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let command = std::mem::replace(&mut cli.command, Command::Run);
    let is_all = matches!(command, Command::All);
    let (kind, over) = overrides(cli, command);
    if is_all {
        let root = cli
            .out
            .clone()
            .or(file.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("gapwave-out"));
        let seed = cli.seed.or(file.seed);
        return Kind::ALL
            .iter()
            .map(|&k| ExperimentConfig::resolve(k, ConfigFile::default(), seed, Some(root.join(k.name())), vec![]))
            .collect();
    }
    let kind = match kind.or(file.kind) {
        Some(k) => k,
        None => return Err(ConfigError("`run` needs a config file with a `kind`".into())),
    };
    Ok(vec![ExperimentConfig::resolve(
        kind,
        file,
        cli.seed,
        cli.out.clone(),
        over,
    )?])
}

fn main() -> ExitCode {
    let mut cli = Cli::parse();
    let cfgs = match configs(&mut cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let statuses: Vec<Status> = std::thread::scope(|scope| {
        let handles: Vec<_> = cfgs.iter().map(|cfg| scope.spawn(|| execute(cfg, &cli))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or(Status::Fail)).collect()
    });
    if statuses.iter().any(|s| matches!(s, Status::Invalid)) {
        ExitCode::from(2)
    } else if statuses.iter().any(|s| matches!(s, Status::Fail)) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
