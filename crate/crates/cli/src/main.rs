//! `pairwave`: tables and cross-check reports for the pair-excitation library.
//!
//! Exit codes: 0 clean, 1 configuration or infeasible input, 2 some rows (or
//! self-checks) failed numerically.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::{parse_m_range, Format, Grid, RunConfig};
use pairwave_core::validation;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("infeasible trap: {0}")]
    Infeasible(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Parser, Debug)]
#[command(name = "pairwave", version, about = "Pair-excitation tables for a zero-temperature Bose gas (ħ = 2m = 1)")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by all subcommands; they override the config file.
#[derive(Args, Debug)]
struct Common {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Tolerance of the reference quadratures, solvers and series truncation.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Rotation angle of the oracle's integration ray, in (0, π/4).
    #[arg(long, global = true)]
    contour_angle: Option<f64>,
    /// Region threshold of the asymptotic series.
    #[arg(long, global = true)]
    region_thresh: Option<f64>,
    /// Worker threads (0: one per core).
    #[arg(long, global = true, env = "PAIRWAVE_THREADS")]
    threads: Option<usize>,
    /// Coupling g = 16πaρ₀.
    #[arg(long, global = true)]
    g: Option<f64>,
    /// Record the generation time in the metadata.
    #[arg(long, global = true)]
    stamp: bool,
}

#[derive(Clone, Debug)]
struct MList(Vec<i64>);

#[derive(Subcommand, Debug)]
enum Command {
    /// Λ(r̃, τ) from the asymptotic series against the contour oracle.
    LambdaTable {
        #[arg(long, value_delimiter = ',')]
        r_tilde: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        tau: Option<Vec<f64>>,
    },
    /// Steady kernel g₀(r) with a quadrature cross-check.
    Steady {
        #[arg(long, value_delimiter = ',')]
        r: Option<Vec<f64>>,
    },
    /// Propagator poles for each t and m.
    Poles {
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
        /// Pole indices, e.g. `-2,-1,1,2`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "m_range")]
        m: Option<Vec<i64>>,
        /// Inclusive index range `a:b`, zero skipped.
        #[arg(long, allow_hyphen_values = true, value_parser = |s: &str| parse_m_range(s).map(MList))]
        m_range: Option<MList>,
    },
    /// Thomas–Fermi profile, local scales and optional Λ in a trap.
    TrapProfile {
        /// Centre-of-mass distances along the x axis.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        /// Relative distances at which to evaluate Λ (needs --t).
        #[arg(long, value_delimiter = ',')]
        r: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
        /// Trap slowness parameter ε.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Evaluate Λ with the contour oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Run the invariant suite and report PASS/FAIL per check.
    SelfCheck {
        /// Run only these checks (1-based).
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<usize>>,
    },
}

fn grid(v: Option<Vec<f64>>) -> Option<Grid> {
    v.map(Grid::Values)
}

/// Config file, then flags on top.
fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let base = match &cli.common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let c = &cli.common;
    let mut flags = RunConfig {
        g: c.g,
        tol: c.tol,
        contour_angle: c.contour_angle,
        region_thresh: c.region_thresh,
        threads: c.threads,
        out: c.out.clone(),
        format: c.format,
        stamp: c.stamp.then_some(true),
        ..Default::default()
    };
    let mut epsilon = None;
    let mut radii = None;
    let mut oracle = false;
    match &cli.command {
        Command::LambdaTable { r_tilde, tau } => {
            flags.r_tilde = grid(r_tilde.clone());
            flags.tau = grid(tau.clone());
        }
        Command::Steady { r } => flags.r = grid(r.clone()),
        Command::Poles { t, m, m_range } => {
            flags.t = grid(t.clone());
            flags.m = m.clone().or_else(|| m_range.clone().map(|l| l.0));
        }
        Command::TrapProfile { radii: rd, r, t, epsilon: eps, oracle: o } => {
            flags.r = grid(r.clone());
            flags.t = grid(t.clone());
            radii = grid(rd.clone());
            epsilon = *eps;
            oracle = *o;
        }
        Command::SelfCheck { .. } => {}
    }
    let mut cfg = base.overlay(flags);
    if epsilon.is_some() || radii.is_some() || oracle {
        let trap = cfg.trap.get_or_insert_with(Default::default);
        if let Some(e) = epsilon {
            trap.epsilon = e;
        }
        if radii.is_some() {
            trap.radii = radii;
        }
        trap.oracle |= oracle;
    }
    Ok(cfg)
}

fn sink(cfg: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.out {
        Some(p) => Box::new(BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn self_check(cfg: &RunConfig, only: Option<&[usize]>) -> Result<bool, CliError> {
    let ids: Vec<usize> = match only {
        Some(ids) => {
            if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > validation::SUITE_LEN) {
                return Err(CliError::Config(format!("no check {bad}; valid ids are 1..={}", validation::SUITE_LEN)));
            }
            ids.to_vec()
        }
        None => (1..=validation::SUITE_LEN).collect(),
    };
    let mut out = sink(cfg)?;
    let mut failed = 0;
    for id in ids {
        let check = validation::run_check(id).expect("validated id");
        failed += usize::from(!check.pass);
        writeln!(out, "{}", check.line())?;
        out.flush()?;
    }
    writeln!(
        out,
        "{}",
        if failed == 0 { "all checks passed".to_string() } else { format!("{failed} check(s) failed") }
    )?;
    out.flush()?;
    Ok(failed == 0)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let cfg = resolve(&cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let table = pool.install(|| match &cli.command {
        Command::LambdaTable { .. } => commands::lambda_table(&cfg).map(Some),
        Command::Steady { .. } => commands::steady(&cfg).map(Some),
        Command::Poles { .. } => commands::poles(&cfg).map(Some),
        Command::TrapProfile { .. } => commands::trap_profile(&cfg).map(Some),
        Command::SelfCheck { .. } => Ok(None),
    })?;
    let Some(mut table) = table else {
        let only = match &cli.command {
            Command::SelfCheck { only } => only.as_deref(),
            _ => None,
        };
        let ok = pool.install(|| self_check(&cfg, only))?;
        return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(2) });
    };
    if cfg.stamp == Some(true) {
        let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
        table.meta("generated_at_unix", now);
    }
    table.write(cfg.format.unwrap_or_default(), sink(&cfg)?)?;
    if table.flagged > 0 {
        eprintln!("pairwave: {} of {} rows flagged", table.flagged, table.rows.len());
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("pairwave: {e}");
            ExitCode::from(1)
        }
    }
}
