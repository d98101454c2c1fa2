//! `gmax`: run the experiments, certify Hölder constants, dump sample paths.
//!
//! Exit status: 0 on success, 2 when an experiment's checks fail, 3 for
//! configuration errors, 1 for anything else.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use gmax::experiments::{run, with_threads, Experiment, ExperimentConfig};
use gmax::kernels::HolderConstants;
use gmax::{Error, PathSampler, ProcessSpec, ProcessSpecFile};

#[derive(Parser)]
#[command(
    name = "gmax",
    version,
    about = "Expected maxima of Hölder Gaussian processes and fBm"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expected fBm grid maxima over an (H, n) grid.
    Fig1(RunArgs),
    /// Estimates at a fine grid against the lower bound 1/(5√H).
    Fig2(RunArgs),
    /// Table of closed-form bounds.
    Bounds(RunArgs),
    /// Coupled coarse/fine grid gaps against the discretization bound.
    DeltaStudy(RunArgs),
    /// Small-H estimates against the white-noise limit.
    LimitH0(RunArgs),
    /// Growth of the grid maximum as H → 0.
    #[command(alias = "thm3-demo")]
    SmallHDemo(RunArgs),
    /// Check two-sided Hölder constants for a process on a grid.
    Certify(CertifyArgs),
    /// Run the experiment named inside a config file.
    Run(RunArgs),
    /// Sample paths and write them as CSV or binary.
    Sample(SampleArgs),
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated Hurst indices.
    #[arg(long, value_delimiter = ',')]
    h_grid: Option<Vec<f64>>,
    /// Comma-separated grid sizes.
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    /// Number of paths (even; antithetic pairs).
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Confidence level for the reported half-widths.
    #[arg(long)]
    ci: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "GMAX_THREADS")]
    threads: Option<usize>,
    /// Fine grid for the gap study.
    #[arg(long)]
    fine_n: Option<usize>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Process spec JSON file.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    h1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    h2: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Binary,
}

#[derive(Args)]
struct SampleArgs {
    /// Process spec JSON file (fBm with --hurst otherwise).
    #[arg(long, conflicts_with = "hurst")]
    spec: Option<PathBuf>,
    #[arg(long)]
    hurst: Option<f64>,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    paths: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    antithetic: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "GMAX_THREADS")]
    threads: Option<usize>,
}

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EmbeddingFailure { .. }
            | Error::NotPsd(_)
            | Error::InternalConsistency(_)
            | Error::Construction(_)
            | Error::Validity(_) => Self::Runtime(e.into()),
            _ => Self::Config(e.into()),
        }
    }
}

fn config_error(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

fn build_config(
    experiment: Option<Experiment>,
    args: &RunArgs,
) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match (&args.config, experiment) {
        (Some(path), _) => {
            let cfg = ExperimentConfig::load(path)
                .with_context(|| format!("reading config {}", path.display()))
                .map_err(config_error)?;
            if let Some(e) = experiment.filter(|&e| e != cfg.experiment) {
                return Err(config_error(anyhow::anyhow!(
                    "config is for {:?}, not {}",
                    cfg.experiment,
                    e.name()
                )));
            }
            cfg
        }
        (None, Some(e)) => ExperimentConfig::defaults(e),
        (None, None) => return Err(config_error(anyhow::anyhow!("`run` needs --config"))),
    };
    if let Some(h) = &args.h_grid {
        cfg.h_grid = h.clone();
    }
    if let Some(n) = &args.n_grid {
        cfg.n_grid = n.clone();
    }
    if let Some(m) = args.paths {
        cfg.paths = m;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(ci) = args.ci {
        cfg.ci_level = ci;
    }
    if let Some(out) = &args.out {
        cfg.output_path = Some(out.display().to_string());
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    if args.fine_n.is_some() {
        cfg.fine_n = args.fine_n;
    }
    Ok(cfg)
}

fn write_output(path: Option<&str>, contents: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, contents)
            .with_context(|| format!("writing {p}"))
            .map_err(Failure::Runtime),
        None => std::io::stdout()
            .write_all(contents)
            .context("writing to stdout")
            .map_err(Failure::Runtime),
    }
}

fn run_experiment(cfg: ExperimentConfig) -> Result<ExitCode, Failure> {
    cfg.validate()?;
    let out = run(&cfg)?;
    write_output(cfg.output_path.as_deref(), out.contents.as_bytes())?;
    if out.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        for f in &out.failures {
            eprintln!("check failed: {f}");
        }
        Ok(ExitCode::from(2))
    }
}

fn certify(args: &CertifyArgs) -> Result<ExitCode, Failure> {
    let mut cfg = build_config(Some(Experiment::Certify), &args.run)?;
    if let Some(spec) = &args.spec {
        cfg.spec = None;
        cfg.spec_file = Some(spec.display().to_string());
        cfg.base_dir = None;
    }
    match (args.c1, args.h1, args.c2, args.h2) {
        (Some(c1), Some(h1), Some(c2), Some(h2)) => {
            cfg.constants = Some(HolderConstants { c1, h1, c2, h2 })
        }
        (None, None, None, None) => {}
        _ => {
            return Err(config_error(anyhow::anyhow!(
                "give all of --c1 --h1 --c2 --h2 or none"
            )))
        }
    }
    if args.grid.is_some() {
        cfg.grid_size = args.grid;
    }
    run_experiment(cfg)
}

fn sample(args: &SampleArgs) -> Result<ExitCode, Failure> {
    let spec: ProcessSpec<f64> = match (&args.spec, args.hurst) {
        (Some(path), _) => ProcessSpecFile::load(path)?,
        (None, Some(h)) => ProcessSpec::fbm(h)?,
        (None, None) => return Err(config_error(anyhow::anyhow!("give --spec or --hurst"))),
    };
    let batch = with_threads(args.threads, || {
        PathSampler::new(&spec, args.n)
            .and_then(|s| s.sample(args.paths, args.seed, args.antithetic))
    })??;
    let mut bytes = Vec::new();
    match args.format {
        Format::Csv => batch.write_csv(&mut bytes)?,
        Format::Binary => {
            if args.out.is_none() {
                return Err(config_error(anyhow::anyhow!("binary output needs --out")));
            }
            batch.write_binary(&mut bytes)?
        }
    }
    let out = args.out.as_ref().map(|p| p.display().to_string());
    write_output(out.as_deref(), &bytes)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Fig1(a) => build_config(Some(Experiment::Fig1), a).and_then(run_experiment),
        Command::Fig2(a) => build_config(Some(Experiment::Fig2), a).and_then(run_experiment),
        Command::Bounds(a) => {
            build_config(Some(Experiment::BoundsTable), a).and_then(run_experiment)
        }
        Command::DeltaStudy(a) => {
            build_config(Some(Experiment::DeltaStudy), a).and_then(run_experiment)
        }
        Command::LimitH0(a) => build_config(Some(Experiment::LimitH0), a).and_then(run_experiment),
        Command::SmallHDemo(a) => {
            build_config(Some(Experiment::SmallHDemo), a).and_then(run_experiment)
        }
        Command::Certify(a) => certify(a),
        Command::Run(a) => build_config(None, a).and_then(run_experiment),
        Command::Sample(a) => sample(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
