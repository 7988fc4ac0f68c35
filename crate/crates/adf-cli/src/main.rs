//! Experiment runner. Every subcommand resolves one flat configuration
//! (defaults, then an optional file, then repeatable `--set key=value`
//! overrides), runs the experiment, writes the trace CSV to `--out`,
//! writes the fully resolved configuration next to it (`<out>.config`,
//! itself loadable via `--config`), and prints the run metrics as
//! `key=value` lines on stdout. Failures print a single
//! `error: ...` line on stderr and exit nonzero.

use std::path::PathBuf;
use std::process::ExitCode;

use adf_cli::config::Config;
use adf_cli::experiments::{run_bench, run_frf, run_ingest, run_loop, RunArtifacts};
use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adf", about = "Streaming derivative-estimator experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Open-loop signal bench: generated signal, optional noise, one filter.
    Bench(RunArgs),
    /// Swept-sine frequency response of all three filters.
    Frf(RunArgs),
    /// Closed-loop servo run with the selected filter in the rate path.
    Loop(RunArgs),
    /// Replay a recorded `t,x` CSV through the selected filter.
    Ingest {
        #[command(flatten)]
        run: RunArgs,
        /// Recorded samples: header `t,x`, strictly increasing time.
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Trace CSV destination; the resolved config lands at `<out>.config`.
    #[arg(long)]
    out: PathBuf,
    /// Optional `key = value` config file (echo files load back in).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key, e.g. `--set delta=2e-4`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // One parsable line: context chain joined by ": ".
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let artifacts = match &cli.cmd {
        Cmd::Bench(a) => dispatch(a, run_bench)?,
        Cmd::Frf(a) => dispatch(a, run_frf)?,
        Cmd::Loop(a) => dispatch(a, run_loop)?,
        Cmd::Ingest { run: a, input } => {
            let cfg = resolve(a)?;
            let mut art = run_ingest(&cfg, input)?;
            art.metrics.push("seed", cfg.seed);
            write_outputs(a, &cfg, &art)?;
            art
        }
    };
    print!("{}", artifacts.metrics.render());
    Ok(())
}

fn dispatch(args: &RunArgs, f: fn(&Config) -> Result<RunArtifacts>) -> Result<RunArtifacts> {
    let cfg = resolve(args)?;
    let mut artifacts = f(&cfg)?;
    artifacts.metrics.push("seed", cfg.seed);
    write_outputs(args, &cfg, &artifacts)?;
    Ok(artifacts)
}

fn resolve(args: &RunArgs) -> Result<Config> {
    Config::resolve(args.config.as_deref(), &args.set)
}

fn write_outputs(args: &RunArgs, cfg: &Config, artifacts: &RunArtifacts) -> Result<()> {
    std::fs::write(&args.out, &artifacts.csv)
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    let mut echo_path = args.out.clone().into_os_string();
    echo_path.push(".config");
    let echo_path = PathBuf::from(echo_path);
    std::fs::write(&echo_path, cfg.echo())
        .with_context(|| format!("cannot write {}", echo_path.display()))?;
    Ok(())
}
