use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use histlab_cli::config::ExperimentKind;
use histlab_cli::error::io_error;
use histlab_cli::run::load_probe_report;
use histlab_cli::{parse_config_with_seed, replay, run_experiment, CliError};

/// Experiments on historic behavior of ergodic averages.
///
/// Each experiment subcommand reads one TOML config, writes CSV/JSON/SVG
/// reports and a manifest.json into the output directory.
/// Exit codes: 0 success, 2 config error, 3 domain or numeric error, 4 I/O error.
#[derive(Parser)]
#[command(name = "histlab", version)]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides `out` in the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Run seed; overrides `seed` in the config.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads for per-cell and per-sample parallelism.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Running Birkhoff averages along one orbit.
    Trace,
    /// Two-dense-sets criterion on sampled points.
    Criterion,
    /// Escaper search over covers at one or more resolutions.
    Probe,
    /// Lyapunov exponent tail bounds along one orbit.
    Lyapunov,
    /// Local entropy of a cylinder measure along one orbit.
    Entropy,
    /// Greedy construction of a word with oscillating averages.
    BuildIrregular,
    /// Weak-Gibbs ratios at sampled points.
    WeakGibbs,
    /// Re-trace escapers from a probe.json and confirm they leave Λ_N.
    Replay {
        /// probe.json written by `histlab probe`.
        #[arg(long, value_name = "PATH")]
        report: PathBuf,
        /// Replay one escaper only, as REPORT:INDEX (cover index, escaper index).
        #[arg(long, value_name = "REPORT:INDEX", value_parser = parse_selector)]
        escaper: Option<(usize, usize)>,
    },
}

fn parse_selector(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected REPORT:INDEX")?;
    Ok((
        a.parse().map_err(|e| format!("{e}"))?,
        b.parse().map_err(|e| format!("{e}"))?,
    ))
}

fn experiment_kind(c: &Command) -> Option<ExperimentKind> {
    Some(match c {
        Command::Trace => ExperimentKind::Trace,
        Command::Criterion => ExperimentKind::Criterion,
        Command::Probe => ExperimentKind::Probe,
        Command::Lyapunov => ExperimentKind::Lyapunov,
        Command::Entropy => ExperimentKind::Entropy,
        Command::BuildIrregular => ExperimentKind::IrregularBuild,
        Command::WeakGibbs => ExperimentKind::WeakGibbs,
        Command::Replay { .. } => return None,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("--threads: {e}")))?;
    }
    if let Command::Replay { report, escaper } = &cli.command {
        let outcomes = replay(&load_probe_report(report)?, *escaper)?;
        let mut refuted = 0;
        for o in &outcomes {
            println!(
                "report {} cell {} sample {}: lambda_membership = {}",
                o.report, o.cell, o.sample, o.lambda_membership
            );
            refuted += o.lambda_membership as usize;
        }
        if refuted > 0 {
            return Err(CliError::Domain {
                context: "replay".into(),
                source: histlab_core::LabError::InvalidArgument(format!(
                    "{refuted} of {} escapers are inside Λ_N on replay",
                    outcomes.len()
                )),
            });
        }
        return Ok(());
    }

    let kind = experiment_kind(&cli.command).expect("experiment subcommand");
    let path = cli
        .config
        .ok_or_else(|| CliError::config(format!("{}: --config PATH is required", kind.name())))?;
    let text = std::fs::read_to_string(&path).map_err(io_error(&path))?;
    let config = parse_config_with_seed(&text, cli.seed).map_err(CliError::Config)?;
    if config.kind() != kind {
        return Err(CliError::config(format!(
            "config describes a {} experiment, not {}",
            config.kind().name(),
            kind.name()
        )));
    }
    let out = cli
        .out
        .or_else(|| config.out.clone())
        .ok_or_else(|| CliError::config("no output directory: pass --out DIR or set `out`"))?;
    let manifest = run_experiment(&config, &out)?;
    for f in &manifest.files {
        println!("{}  {}", f.sha256, out.join(&f.name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("histlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
