//! `blochlab` command line.
//!
//! Exit status is 0 on success, 2 when the input is refused (phi not a
//! self-map, a symbol not holomorphic on the disk, a divergent operator, or
//! malformed input) and 1 on any other failure. Divergent analyses still
//! write their report.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use blochlab::norms::SupSolver;
use blochlab::operators::{analyze, ratio_series, OperatorConfig, Verdict};
use blochlab::report::{analysis_json, cphi_json, ratio_csv, to_json_string};
use blochlab::verify::{parse_anchor_spec, run as run_suite, Suite, VerifyOptions};
use blochlab::zygmund::{cphi_analysis, zygmund_norm};
use blochlab::{AnalyticExpr, GridSpec, SymbolPair, WeightId};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

const THREADS_ENV: &str = "BLOCHLAB_THREADS";

#[derive(Parser)]
#[command(name = "blochlab", version, about = "Weighted composition operators on logarithmic Bloch-type spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continuity verdict, ratio series and essential-norm band of W_{u,phi}
    Analyze {
        /// Multiplier u, e.g. "1 + z^2"
        #[arg(long)]
        u: String,
        /// Self-map phi of the disk, e.g. "(z + 0.3)/(1 + 0.3*z)"
        #[arg(long)]
        phi: String,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// C_phi on the logarithmic Zygmund space, through W_{phi', phi}
    AnalyzeCphi {
        #[arg(long)]
        phi: String,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Growth, Bloch and Zygmund norms of a single function
    Norms {
        /// Function of z
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "vlog")]
        weight: WeightId,
        #[arg(long, default_value = "512x256")]
        grid: GridSpec,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV table of the J and I ratios
    Sequence {
        #[arg(long)]
        u: String,
        #[arg(long)]
        phi: String,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Built-in verification suites
    Verify {
        /// all, weights, testfns or identities
        #[arg(default_value = "all")]
        suite: Suite,
        /// geometric:K for anchors 1 - 2^-k, or list:a,b,...
        #[arg(long, default_value = "geometric:20")]
        anchors: String,
        #[arg(long, default_value = "512x256")]
        grid: GridSpec,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Largest power of phi in the reported series
    #[arg(long, default_value_t = 400)]
    nmax: u32,
    /// Radial x angular grid nodes
    #[arg(long, default_value = "512x256")]
    grid: GridSpec,
    /// Relative tolerance, also the compactness threshold
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

impl RunArgs {
    fn config(&self) -> Result<OperatorConfig> {
        let cfg = OperatorConfig {
            nmax: self.nmax,
            grid: self.grid,
            tol: self.tol,
            ..OperatorConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct OutArgs {
    /// JSON report path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional CSV ratio table path
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse(text: &str, what: &str) -> Result<AnalyticExpr> {
    AnalyticExpr::parse(text)
        .map_err(blochlab::Error::from)
        .with_context(|| format!("parsing {what} `{text}`"))
}

enum Outcome {
    Done,
    Refused,
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Analyze { u, phi, run, out } => {
            let cfg = run.config()?;
            let pair = SymbolPair::new(parse(&u, "u")?, parse(&phi, "phi")?, cfg.grid)?;
            let report = analyze(&pair, &cfg)?;
            write_or_print(out.out.as_deref(), &to_json_string(&analysis_json(&report)))?;
            if let Some(p) = out.csv.as_deref() {
                write_or_print(Some(p), &ratio_csv(&report.series.j, &report.series.i))?;
            }
            Ok(verdict_outcome(report.verdict))
        }
        Command::AnalyzeCphi { phi, run, out } => {
            let cfg = run.config()?;
            let report = cphi_analysis(&parse(&phi, "phi")?, &cfg)?;
            write_or_print(out.out.as_deref(), &to_json_string(&cphi_json(&report)))?;
            if let Some(p) = out.csv.as_deref() {
                let s = &report.report.series;
                write_or_print(Some(p), &ratio_csv(&s.j, &s.i))?;
            }
            Ok(verdict_outcome(report.report.verdict))
        }
        Command::Norms { f, weight, grid, out } => {
            let f = parse(&f, "f")?;
            let v = weight.weight();
            let solver = SupSolver::new(grid);
            let value = json!({
                "f": f.to_string(),
                "weight": weight,
                "grid": grid.to_string(),
                "tol": blochlab::norms::DEFAULT_TOL,
                "growth": solver.growth_norm(&v, &f)?,
                "bloch": solver.bloch_norm(&v, &f)?,
                "bloch_seminorm": solver.bloch_seminorm(&v, &f)?,
                "zygmund": zygmund_norm(&solver, &v, &f)?,
            });
            write_or_print(out.as_deref(), &to_json_string(&value))?;
            Ok(Outcome::Done)
        }
        Command::Sequence { u, phi, run, csv } => {
            let cfg = run.config()?;
            let pair = SymbolPair::new(parse(&u, "u")?, parse(&phi, "phi")?, cfg.grid)?;
            let series = ratio_series(&pair, &cfg, cfg.nmax)?;
            write_or_print(csv.as_deref(), &ratio_csv(&series.j, &series.i))?;
            Ok(Outcome::Done)
        }
        Command::Verify { suite, anchors, grid } => {
            let opts = VerifyOptions {
                grid,
                anchors: parse_anchor_spec(&anchors)?,
                ..VerifyOptions::default()
            };
            let checks = run_suite(suite, &opts)?;
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} checks, {failed} failed", checks.len());
            if failed > 0 {
                anyhow::bail!("{failed} verification checks failed");
            }
            Ok(Outcome::Done)
        }
    }
}

fn verdict_outcome(verdict: Verdict) -> Outcome {
    if verdict == Verdict::Divergent {
        eprintln!("refused: ratio tails grow, the operator is not continuous; report written without a band");
        Outcome::Refused
    } else {
        Outcome::Done
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .with_context(|| format!("{THREADS_ENV} must be a positive integer, got `{raw}`"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

/// Refusals and malformed input exit with 2, everything else with 1.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<blochlab::Error>() {
        Some(e) if e.is_refusal() => 2,
        Some(blochlab::Error::Parse(_) | blochlab::Error::InvalidArgument(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(cli));
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Refused) => ExitCode::from(2),
        Err(err) => {
            let code = exit_code_for(&err);
            let label = if code == 2 { "refused" } else { "error" };
            eprintln!("{label}: {err:#}");
            ExitCode::from(code)
        }
    }
}
