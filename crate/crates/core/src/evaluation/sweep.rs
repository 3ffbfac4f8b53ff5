//! Grids of independent experiment cells.
//!
//! A cell samples a clean training set, corrupts its labels, fits an
//! estimator, optionally corrects it, and measures risk against clean test
//! labels. Cell `i` of an experiment draws all its randomness from
//! `cell_seed(master_seed, i)`, so results do not depend on scheduling.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use super::{binomial, conditional_risk_exact, posterior_error_at, RiskReport};
use crate::distributions::{bayes_risk_exact, Dataset, GroundTruth};
use crate::error::{Error, Result};
use crate::estimators::{oracle_noisy_posterior, true_posterior, EstimatorSpec};
use crate::mitigation::Mitigation;
use crate::noise_channel::TransitionMatrix;
use crate::seeding::{cell_seed, rng_from_seed};
use crate::simplex;

/// Where cells get their data.
#[derive(Clone)]
pub enum DataSource {
    /// A generative model with known posteriors. Discrete distributions are
    /// evaluated exactly, everything else on fresh test draws.
    Truth(Arc<dyn GroundTruth>),
    /// A fixed labelled sample, split into train and test per cell. No
    /// oracle quantities are available.
    Sample(Arc<Dataset>),
}

impl DataSource {
    pub fn num_classes(&self) -> usize {
        match self {
            DataSource::Truth(t) => t.num_classes(),
            DataSource::Sample(s) => s.k,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DataSource::Truth(t) => t.dim(),
            DataSource::Sample(s) => s.d,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            DataSource::Truth(t) => t.describe(),
            DataSource::Sample(s) => s.provenance.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    Symmetric,
    Shift,
    /// Binary class-dependent noise; the swept level is `alpha`, `beta` is fixed.
    Binary {
        beta: f64,
    },
}

impl NoiseKind {
    pub fn channel(&self, k: usize, alpha: f64) -> Result<TransitionMatrix> {
        match *self {
            NoiseKind::Symmetric => TransitionMatrix::symmetric(k, alpha),
            NoiseKind::Shift => TransitionMatrix::shift(k, alpha),
            NoiseKind::Binary { beta } => {
                if k != 2 {
                    return Err(Error::Domain(format!("binary noise needs K = 2, got K = {k}")));
                }
                TransitionMatrix::binary(alpha, beta)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::Symmetric => "symmetric",
            NoiseKind::Shift => "shift",
            NoiseKind::Binary { .. } => "binary",
        }
    }
}

/// Noise-level sweep: one cell per (alpha, seed), ordered alpha-major.
#[derive(Clone)]
pub struct SweepSpec {
    pub experiment_id: String,
    pub source: DataSource,
    pub estimator: EstimatorSpec,
    pub noise: NoiseKind,
    pub alphas: Vec<f64>,
    pub mitigation: Mitigation,
    pub n_train: usize,
    pub n_test: usize,
    pub seeds: usize,
    pub master_seed: u64,
}

/// Sample-size sweep at a fixed noise level: one cell per (n, seed).
#[derive(Clone)]
pub struct ConsistencySpec {
    pub experiment_id: String,
    pub source: DataSource,
    pub estimator: EstimatorSpec,
    pub noise: NoiseKind,
    pub alpha: f64,
    pub mitigation: Mitigation,
    pub n_grid: Vec<usize>,
    pub n_test: usize,
    pub seeds: usize,
    pub master_seed: u64,
}

/// A cell that could not be completed, with enough context to write a
/// failure row.
#[derive(Debug, Clone, PartialEq)]
pub struct CellError {
    pub seed: u64,
    pub alpha: f64,
    pub n_train: usize,
    pub error: Error,
}

struct Cell<'a> {
    experiment_id: &'a str,
    source: &'a DataSource,
    estimator: &'a EstimatorSpec,
    noise: NoiseKind,
    mitigation: Mitigation,
    alpha: f64,
    n_train: usize,
    n_test: usize,
    seed: u64,
}

impl Cell<'_> {
    fn run(&self) -> std::result::Result<RiskReport, CellError> {
        self.run_inner().map_err(|error| CellError { seed: self.seed, alpha: self.alpha, n_train: self.n_train, error })
    }

    fn run_inner(&self) -> Result<RiskReport> {
        let k = self.source.num_classes();
        let channel = self.noise.channel(k, self.alpha)?;
        let mut rng = rng_from_seed(self.seed);
        let (truth, train, test) = match self.source {
            DataSource::Truth(t) => (Some(t), t.sample(self.n_train, &mut rng), None),
            DataSource::Sample(s) => {
                if self.n_train == 0 || self.n_train >= s.len() {
                    return Err(Error::Domain(format!(
                        "n_train = {} must be positive and smaller than the dataset size {}",
                        self.n_train,
                        s.len()
                    )));
                }
                let mut order: Vec<usize> = (0..s.len()).collect();
                order.shuffle(&mut rng);
                let test_end = (self.n_train + self.n_test).min(s.len());
                (None, s.subset(&order[..self.n_train]), Some(s.subset(&order[self.n_train..test_end])))
            }
        };
        let noisy = train.corrupted(&channel, &mut rng, self.seed)?;
        let est = self.estimator.fit(&noisy, truth, &channel, &mut rng)?;
        let est = self.mitigation.apply(est, &channel)?;

        let mut report = RiskReport {
            experiment_id: self.experiment_id.to_string(),
            seed: self.seed,
            k,
            d: self.source.dim(),
            distribution: self.source.describe(),
            noise_kind: self.noise.name().to_string(),
            alpha: self.alpha,
            beta: channel.kind().beta(),
            n_train: self.n_train,
            estimator: est.meta().to_string(),
            mitigation: self.mitigation,
            risk: f64::NAN,
            risk_se: 0.0,
            bayes_risk: f64::NAN,
            excess_risk: f64::NAN,
            l1_posterior_error: f64::NAN,
            l2_posterior_error: f64::NAN,
        };

        match (truth, test) {
            (Some(truth), _) => {
                // Uncorrected estimators target the noisy posterior; corrected
                // ones target the clean posterior.
                let target = match self.mitigation {
                    Mitigation::None => oracle_noisy_posterior(Arc::clone(truth), &channel)?,
                    _ => true_posterior(Arc::clone(truth)),
                };
                if let Some(d) = truth.as_discrete() {
                    report.risk = conditional_risk_exact(|x| est.classify(x), d)?;
                    report.bayes_risk = bayes_risk_exact(d);
                    let e = posterior_error_at(&est, &target, d.points(), Some(d.weights()))?;
                    report.l1_posterior_error = e.l1;
                    report.l2_posterior_error = e.l2;
                } else {
                    let test = truth.sample(self.n_test, &mut rng);
                    let rows = test
                        .features
                        .par_iter()
                        .zip(&test.labels)
                        .map(|(x, &y)| {
                            let q = est.predict(x)?;
                            let t = target.predict(x)?;
                            let p = truth.posterior(x)?;
                            Ok((
                                simplex::argmax(&q) != y,
                                1.0 - p[simplex::argmax(&p)],
                                simplex::l1_distance(&q, &t),
                                simplex::squared_distance(&q, &t),
                            ))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let m = rows.len() as f64;
                    let wrong = rows.iter().filter(|r| r.0).count();
                    (report.risk, report.risk_se) = binomial(wrong, rows.len());
                    report.bayes_risk = rows.iter().map(|r| r.1).sum::<f64>() / m;
                    report.l1_posterior_error = rows.iter().map(|r| r.2).sum::<f64>() / m;
                    report.l2_posterior_error = rows.iter().map(|r| r.3).sum::<f64>() / m;
                }
                report.excess_risk = report.risk - report.bayes_risk;
            }
            (None, Some(test)) => {
                if test.is_empty() {
                    return Err(Error::Domain("no test points left after the training split".into()));
                }
                let wrong = test
                    .features
                    .par_iter()
                    .zip(&test.labels)
                    .map(|(x, &y)| est.classify(x).map(|c| (c != y) as usize))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .sum::<usize>();
                (report.risk, report.risk_se) = binomial(wrong, test.len());
            }
            (None, None) => unreachable!("every data source yields a test set"),
        }
        report.validate()?;
        Ok(report)
    }
}

fn check_common(source: &DataSource, n_test: usize, seeds: usize) -> Result<()> {
    if seeds == 0 {
        return Err(Error::config("experiment.seeds", "must be positive"));
    }
    if matches!(source, DataSource::Truth(t) if t.as_discrete().is_none()) && n_test < 100 {
        return Err(Error::config("experiment.n_test", "must be at least 100"));
    }
    Ok(())
}

/// Runs every cell of a noise sweep, keeping per-cell failures.
pub fn sweep_noise_cells(spec: &SweepSpec) -> Result<Vec<std::result::Result<RiskReport, CellError>>> {
    check_common(&spec.source, spec.n_test, spec.seeds)?;
    if spec.alphas.is_empty() {
        return Err(Error::config("channel.alphas", "grid is empty"));
    }
    let cells: Vec<Cell> = spec
        .alphas
        .iter()
        .enumerate()
        .flat_map(|(a, &alpha)| {
            (0..spec.seeds).map(move |s| Cell {
                experiment_id: &spec.experiment_id,
                source: &spec.source,
                estimator: &spec.estimator,
                noise: spec.noise,
                mitigation: spec.mitigation,
                alpha,
                n_train: spec.n_train,
                n_test: spec.n_test,
                seed: cell_seed(spec.master_seed, (a * spec.seeds + s) as u64),
            })
        })
        .collect();
    Ok(cells.par_iter().map(Cell::run).collect())
}

/// Noise sweep; fails on the first failing cell.
pub fn sweep_noise(spec: &SweepSpec) -> Result<Vec<RiskReport>> {
    sweep_noise_cells(spec)?.into_iter().map(|r| r.map_err(|e| e.error)).collect()
}

pub fn consistency_trend_cells(spec: &ConsistencySpec) -> Result<Vec<std::result::Result<RiskReport, CellError>>> {
    check_common(&spec.source, spec.n_test, spec.seeds)?;
    if spec.n_grid.is_empty() {
        return Err(Error::config("experiment.n_grid", "grid is empty"));
    }
    if spec.n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("experiment.n_grid", "must be strictly increasing"));
    }
    let cells: Vec<Cell> = spec
        .n_grid
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| {
            (0..spec.seeds).map(move |s| Cell {
                experiment_id: &spec.experiment_id,
                source: &spec.source,
                estimator: &spec.estimator,
                noise: spec.noise,
                mitigation: spec.mitigation,
                alpha: spec.alpha,
                n_train: n,
                n_test: spec.n_test,
                seed: cell_seed(spec.master_seed, (i * spec.seeds + s) as u64),
            })
        })
        .collect();
    Ok(cells.par_iter().map(Cell::run).collect())
}

/// Posterior error (and risk) of the fitted estimator at each training size.
pub fn consistency_trend(spec: &ConsistencySpec) -> Result<Vec<RiskReport>> {
    consistency_trend_cells(spec)?.into_iter().map(|r| r.map_err(|e| e.error)).collect()
}

/// Seed-averaged view of a consistency run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendPoint {
    pub n_train: usize,
    pub seeds: usize,
    pub mean_l1: f64,
    pub mean_l2: f64,
    pub mean_risk: f64,
}

/// Averages reports sharing `n_train`, in order of first appearance.
pub fn summarize_by_n(reports: &[RiskReport]) -> Vec<TrendPoint> {
    let mut out: Vec<TrendPoint> = Vec::new();
    for r in reports {
        let point = match out.iter_mut().find(|p| p.n_train == r.n_train) {
            Some(p) => p,
            None => {
                out.push(TrendPoint { n_train: r.n_train, seeds: 0, mean_l1: 0.0, mean_l2: 0.0, mean_risk: 0.0 });
                out.last_mut().unwrap()
            }
        };
        point.seeds += 1;
        point.mean_l1 += r.l1_posterior_error;
        point.mean_l2 += r.l2_posterior_error;
        point.mean_risk += r.risk;
    }
    for p in &mut out {
        let s = p.seeds as f64;
        p.mean_l1 /= s;
        p.mean_l2 /= s;
        p.mean_risk /= s;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{random_discrete, GaussianMixture, Provenance};

    fn knn() -> EstimatorSpec {
        EstimatorSpec::Knn { k_neighbors: None }
    }

    fn small_sweep(source: DataSource, estimator: EstimatorSpec) -> SweepSpec {
        SweepSpec {
            experiment_id: "t".into(),
            source,
            estimator,
            noise: NoiseKind::Symmetric,
            alphas: vec![0.0, 0.3],
            mitigation: Mitigation::None,
            n_train: 400,
            n_test: 300,
            seeds: 2,
            master_seed: 5,
        }
    }

    #[test]
    fn reports_are_ordered_and_reproducible() {
        let g: Arc<dyn GroundTruth> = Arc::new(GaussianMixture::circle(3, 3.0, 1.0).unwrap());
        let spec = small_sweep(DataSource::Truth(g), knn());
        let a = sweep_noise(&spec).unwrap();
        let b = sweep_noise(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        assert_eq!(a.iter().map(|r| r.alpha).collect::<Vec<_>>(), vec![0.0, 0.0, 0.3, 0.3]);
        for r in &a {
            r.validate().unwrap();
            assert!(r.risk_se > 0.0);
        }
    }

    #[test]
    fn oracle_on_discrete_is_exact() {
        let d = random_discrete(3, 20, 8).unwrap();
        let truth: Arc<dyn GroundTruth> = Arc::new(d);
        let spec = small_sweep(DataSource::Truth(truth), EstimatorSpec::Oracle);
        for r in sweep_noise(&spec).unwrap() {
            assert_eq!(r.risk_se, 0.0);
            assert_eq!(r.l1_posterior_error, 0.0);
            assert!(r.excess_risk.abs() < 1e-12);
        }
    }

    #[test]
    fn sample_source_has_no_oracle_columns() {
        let g = GaussianMixture::circle(2, 3.0, 1.0).unwrap();
        let mut ds = g.sample(600, &mut rng_from_seed(1));
        ds.provenance = Provenance::Ingested { source: "mem".into() };
        let spec = small_sweep(DataSource::Sample(Arc::new(ds)), knn());
        let reports = sweep_noise(&spec).unwrap();
        for r in &reports {
            assert!(r.bayes_risk.is_nan() && r.excess_risk.is_nan() && r.l1_posterior_error.is_nan());
            assert!(r.risk.is_finite());
        }
        let oracle = small_sweep(spec.source.clone(), EstimatorSpec::Oracle);
        assert!(sweep_noise(&oracle).is_err());
    }

    #[test]
    fn per_cell_errors_are_kept() {
        let g: Arc<dyn GroundTruth> = Arc::new(GaussianMixture::circle(2, 3.0, 1.0).unwrap());
        let mut spec = small_sweep(DataSource::Truth(g), knn());
        spec.alphas = vec![0.1, 0.6];
        spec.mitigation = Mitigation::KnownSymmetric;
        let cells = sweep_noise_cells(&spec).unwrap();
        assert!(cells[0].is_ok() && cells[1].is_ok());
        assert!(matches!(cells[2].as_ref().unwrap_err().error, Error::AboveThreshold { .. }));
        assert!(sweep_noise(&spec).is_err());
    }

    #[test]
    fn consistency_oracle_is_exact_and_summary_averages() {
        let g: Arc<dyn GroundTruth> = Arc::new(GaussianMixture::circle(3, 3.0, 1.0).unwrap());
        let spec = ConsistencySpec {
            experiment_id: "c".into(),
            source: DataSource::Truth(g),
            estimator: EstimatorSpec::Oracle,
            noise: NoiseKind::Symmetric,
            alpha: 0.3,
            mitigation: Mitigation::None,
            n_grid: vec![100, 200],
            n_test: 200,
            seeds: 3,
            master_seed: 1,
        };
        let reports = consistency_trend(&spec).unwrap();
        let summary = summarize_by_n(&reports);
        assert_eq!(summary.len(), 2);
        assert!(summary.iter().all(|p| p.mean_l1 == 0.0 && p.seeds == 3));

        let bad = ConsistencySpec { n_grid: vec![200, 100], ..spec.clone() };
        assert!(consistency_trend(&bad).is_err());
        let empty = ConsistencySpec { n_grid: vec![], ..spec };
        assert!(consistency_trend(&empty).is_err());
    }
}
