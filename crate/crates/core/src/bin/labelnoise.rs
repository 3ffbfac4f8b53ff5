//! `labelnoise` command-line tool.
//!
//! Exit status: 0 on success, 1 when a verification or experiment cell
//! fails, 2 on usage, configuration or input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use labelnoise::experiment::{self, ExperimentConfig, RunOutput, DEFAULT_LUGOSI_TRIALS};
use labelnoise::mitigation::Mitigation;

#[derive(Parser)]
#[command(name = "labelnoise", version, about = "Label-noise robustness experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact checks of plug-in agreement under symmetric noise and of the binary risk bound.
    Verify {
        /// Number of classes.
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        k: u64,
        /// Random distributions per noise level.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Random distributions for the binary bound check.
        #[arg(long, default_value_t = DEFAULT_LUGOSI_TRIALS)]
        bound_trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Accuracy over a grid of noise levels.
    Sweep(RunArgs),
    /// Posterior error over a grid of training-set sizes.
    Consistency(RunArgs),
    /// Accuracy-vs-noise chart (SVG) from a results CSV.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a labelled CSV table into a dataset file.
    Ingest {
        csv: PathBuf,
        #[arg(long)]
        label_column: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the master seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output path from the config; stdout if neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    #[arg(long, value_parser = parse_mitigation)]
    mitigation: Option<Mitigation>,
}

fn parse_mitigation(s: &str) -> Result<Mitigation, String> {
    s.parse().map_err(|_| format!("expected none, known-symmetric or backward, got `{s}`"))
}

enum Failure {
    /// A check or experiment cell failed.
    Run(String),
    /// Bad usage, config or input.
    Usage(String),
}

impl From<labelnoise::Error> for Failure {
    fn from(e: labelnoise::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write `{}`: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read `{}`: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "results".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.summary.csv"))
}

fn run_experiment(args: RunArgs, consistency: bool) -> Result<(), Failure> {
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start {jobs} workers: {e}")))?;
    }
    let mut cfg =
        ExperimentConfig::load(&args.config).map_err(|e| Failure::Usage(format!("{}: {e}", args.config.display())))?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(m) = args.mitigation {
        cfg.mitigation = m;
    }
    let out_path = args.out.or_else(|| cfg.output_csv.clone());

    let output: RunOutput = if consistency { experiment::run_consistency(&cfg)? } else { experiment::run_sweep(&cfg)? };
    emit(out_path.as_deref(), &output.csv)?;
    if let Some(summary) = &output.summary_csv {
        match &out_path {
            Some(p) => write_file(&summary_path(p), summary)?,
            None => eprint!("{summary}"),
        }
    }
    if output.failures.is_empty() {
        Ok(())
    } else {
        let lines: Vec<String> = output
            .failures
            .iter()
            .map(|f| format!("cell seed={} alpha={} n_train={}: {}", f.seed, f.alpha, f.n_train, f.error))
            .collect();
        Err(Failure::Run(format!("{} cell(s) failed\n{}", lines.len(), lines.join("\n"))))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Verify { k, trials, bound_trials, seed, out } => {
            let report = experiment::run_verify(k as usize, trials, bound_trials, seed)?;
            emit(out.as_deref(), &report.to_json())?;
            if report.passed {
                Ok(())
            } else {
                Err(Failure::Run(format!(
                    "verification failed: {} disagreement(s), {} bound violation(s)",
                    report.symmetric.disagreements.len(),
                    report.binary_bound.violations.len()
                )))
            }
        }
        Command::Sweep(args) => run_experiment(args, false),
        Command::Consistency(args) => run_experiment(args, true),
        Command::Plot { csv, out } => {
            let text = read_file(&csv)?;
            let svg = experiment::render_plot(&text).map_err(|e| Failure::Usage(format!("{}: {e}", csv.display())))?;
            write_file(&out, &svg)
        }
        Command::Ingest { csv, label_column, out } => {
            let text = read_file(&csv)?;
            let ds = experiment::ingest_csv(&text, &label_column, &csv.display().to_string())
                .map_err(|e| Failure::Usage(format!("{}: {e}", csv.display())))?;
            write_file(&out, &experiment::ingested_text(&ds))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
