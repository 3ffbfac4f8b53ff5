//! Configuration, orchestration and file output behind the `labelnoise` binary.
//!
//! Every function here returns the bytes it would write, so the binary only
//! handles paths and exit codes and tests can check outputs directly.

pub mod config;
pub mod ingest;
pub mod plot;
pub mod results;

pub use config::ExperimentConfig;
pub use ingest::{ingest_csv, ingested_text};
pub use plot::{render_plot, sha256_hex};
pub use results::{read_results, ResultRow, RunContext, COLUMNS};

use serde::Serialize;

use crate::error::Result;
use crate::evaluation::{
    consistency_trend_cells, sub_threshold_grid, summarize_by_n, sweep_noise_cells, verify_lugosi_bound,
    verify_theorem1, CellError, LugosiReport, RiskReport, Theorem1Report,
};

/// Symmetric noise levels swept by default.
pub const DEFAULT_SYMMETRIC_GRID: [f64; 14] =
    [0.0, 0.05, 0.1, 0.15, 0.2, 0.4, 0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95, 1.0];
/// Noise levels swept by default for shift and binary noise.
pub const DEFAULT_CLASS_DEPENDENT_GRID: [f64; 7] = [0.0, 0.2, 0.3, 0.45, 0.55, 0.6, 0.8];

/// Trials for the binary bound check run alongside `verify`.
pub const DEFAULT_LUGOSI_TRIALS: usize = 1000;

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub symmetric: Theorem1Report,
    pub binary_bound: LugosiReport,
}

/// Runs the symmetric agreement check for `k` over the full sub-threshold
/// grid and the binary bound check, both seeded from `seed`.
pub fn run_verify(k: usize, trials: usize, lugosi_trials: usize, seed: u64) -> Result<VerifyReport> {
    let symmetric = verify_theorem1(k, &sub_threshold_grid(k)?, trials, seed)?;
    let binary_bound = verify_lugosi_bound(lugosi_trials, seed)?;
    Ok(VerifyReport { passed: symmetric.passed() && binary_bound.passed(), symmetric, binary_bound })
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

/// Output of a sweep or consistency run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv: String,
    pub reports: Vec<RiskReport>,
    pub failures: Vec<CellError>,
    /// Seed-averaged summary; only filled by consistency runs.
    pub summary_csv: Option<String>,
}

fn context(cfg: &ExperimentConfig) -> RunContext {
    let k = cfg.source.num_classes();
    RunContext {
        experiment_id: cfg.id.clone(),
        k,
        d: cfg.source.dim(),
        noise_kind: cfg.noise.name().to_string(),
        beta: match cfg.noise {
            crate::evaluation::NoiseKind::Binary { beta } => Some(beta),
            _ => None,
        },
        estimator: cfg.estimator.name().to_string(),
        mitigation: cfg.mitigation,
    }
}

fn collect(cells: Vec<std::result::Result<RiskReport, CellError>>, cfg: &ExperimentConfig) -> Result<RunOutput> {
    let csv = results::results_to_string(&cells, &context(cfg))?;
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for c in cells {
        match c {
            Ok(r) => reports.push(r),
            Err(e) => failures.push(e),
        }
    }
    Ok(RunOutput { csv, reports, failures, summary_csv: None })
}

/// One row per (alpha, seed) cell.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<RunOutput> {
    collect(sweep_noise_cells(&cfg.sweep_spec()?)?, cfg)
}

/// One row per (n_train, seed) cell plus a per-n summary.
pub fn run_consistency(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut out = collect(consistency_trend_cells(&cfg.consistency_spec()?)?, cfg)?;
    out.summary_csv = Some(results::summary_to_string(&summarize_by_n(&out.reports))?);
    Ok(out)
}
