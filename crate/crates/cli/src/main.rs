//! `morse-levels`: sweep level-set homology, judge topology-change
//! queries, and check sweeps against the admissible Betti deltas.
//!
//! Exit codes: 0 success, 2 config/validation failure, 3 internal
//! invariant violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use morse_levels::scenario::{
    named_example, run_scenario, RunCommand, RunOutputs, ScenarioConfig, ScenarioError,
};

#[derive(Parser)]
#[command(name = "morse-levels", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Homology summaries across a list of levels.
    Sweep(RunArgs),
    /// Topology-change verdict for the configured scenario.
    Verdict(RunArgs),
    /// Check a sweep against the admissible Betti-number deltas.
    Conformance(RunArgs),
    /// Run a named worked example (rp2-no-change, handle-deltas,
    /// pendulum-trichotomy, euler-trichotomy, lens-41).
    Example {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Coefficient systems (Q | Fp:<p> | Z | Zk:<k>); overrides the config.
    #[arg(long = "coeff")]
    coeff: Vec<String>,
    /// Output directory for report.json and attachments.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write CSV and plot-ready series.
    #[arg(long)]
    csv: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = match &cli.cmd {
        Cmd::Sweep(args) => run(args, RunCommand::Sweep),
        Cmd::Verdict(args) => run(args, RunCommand::Verdict),
        Cmd::Conformance(args) => run(args, RunCommand::Conformance),
        Cmd::Example { name, out } => named_example(name).and_then(|outputs| {
            emit(&outputs, out.as_deref())?;
            Ok(outputs)
        }),
    };
    match result {
        Ok(outputs) => {
            eprintln!(
                "done in {:.2}s ({} checks, {} verdicts)",
                started.elapsed().as_secs_f64(),
                outputs.report.results.checks.len(),
                outputs.report.results.verdicts.len(),
            );
            if outputs.all_checks_pass() {
                ExitCode::SUCCESS
            } else {
                eprintln!("some checks failed; see the report");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(args: &RunArgs, command: RunCommand) -> Result<RunOutputs, ScenarioError> {
    let raw = std::fs::read_to_string(&args.config).map_err(|e| {
        ScenarioError::Config(format!("cannot read config {}: {e}", args.config.display()))
    })?;
    let mut cfg = ScenarioConfig::from_json(&raw)?;
    if !args.coeff.is_empty() {
        cfg.coefficients = args.coeff.clone();
    }
    if args.csv {
        cfg.csv = true;
    }
    let outputs = run_scenario(&cfg, &raw, command)?;
    emit(&outputs, args.out.as_deref())?;
    Ok(outputs)
}

fn emit(outputs: &RunOutputs, out_dir: Option<&Path>) -> Result<(), ScenarioError> {
    let report = outputs.report_json();
    match out_dir {
        None => {
            print!("{report}");
        }
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| ScenarioError::Config(format!("cannot create {}: {e}", dir.display())))?;
            let write = |name: &str, contents: &str| {
                std::fs::write(dir.join(name), contents).map_err(|e| {
                    ScenarioError::Config(format!("cannot write {name}: {e}"))
                })
            };
            write("report.json", &report)?;
            for (name, contents) in &outputs.attachments {
                write(name, contents)?;
            }
        }
    }
    Ok(())
}
