//! Experiment configuration files.
//!
//! A config is a small TOML document with flat sections:
//!
//! ```toml
//! [experiment]
//! id = "fig1-knn"
//! seed = 42
//! n_train = 20000          # sweep
//! n_grid = [500, 5000]     # consistency
//! n_test = 10000
//! seeds = 5
//! mitigation = "none"      # none | known-symmetric | backward
//!
//! [distribution]
//! kind = "circle"          # circle | mixture | discrete | dataset
//! k = 10
//! radius = 3.0
//! variance = 1.0
//!
//! [estimator]
//! family = "knn"           # knn | histogram | mlp | oracle
//!
//! [channel]
//! kind = "symmetric"       # symmetric | shift | binary
//! alphas = [0, 0.05, 0.1]  # sweep; defaults depend on the kind
//! alpha = 0.3              # consistency
//!
//! [output]
//! csv = "results.csv"
//! ```
//!
//! Relative paths are resolved against the config file's directory.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use crate::distributions::{Component, Dataset, DiscreteJointDistribution, GaussianMixture, GroundTruth};
use crate::error::{Error, Result};
use crate::estimators::{EmptyCellPolicy, EstimatorSpec, MlpConfig};
use crate::evaluation::{ConsistencySpec, DataSource, NoiseKind, SweepSpec};
use crate::mitigation::Mitigation;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: RawExperiment,
    distribution: RawDistribution,
    estimator: RawEstimator,
    channel: RawChannel,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    id: String,
    seed: u64,
    n_train: Option<usize>,
    n_grid: Option<Vec<usize>>,
    n_test: Option<usize>,
    seeds: Option<usize>,
    mitigation: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistribution {
    kind: String,
    k: Option<usize>,
    radius: Option<f64>,
    variance: Option<f64>,
    priors: Option<Vec<f64>>,
    means: Option<Vec<Vec<f64>>>,
    variances: Option<Vec<Vec<f64>>>,
    path: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEstimator {
    family: String,
    k_neighbors: Option<usize>,
    bin_width: Option<f64>,
    empty_cell: Option<String>,
    hidden: Option<Vec<usize>>,
    learning_rate: Option<f64>,
    batch_size: Option<usize>,
    epochs: Option<usize>,
    momentum: Option<f64>,
    init_gain: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    kind: String,
    alphas: Option<Vec<f64>>,
    alpha: Option<f64>,
    beta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    csv: Option<String>,
}

/// Validated experiment configuration.
#[derive(Clone)]
pub struct ExperimentConfig {
    pub id: String,
    pub master_seed: u64,
    pub source: DataSource,
    pub estimator: EstimatorSpec,
    pub noise: NoiseKind,
    pub alphas: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub mitigation: Mitigation,
    pub n_train: Option<usize>,
    pub n_grid: Option<Vec<usize>>,
    pub n_test: usize,
    pub seeds: usize,
    pub output_csv: Option<PathBuf>,
}

/// Default Monte Carlo test size per cell.
pub const DEFAULT_N_TEST: usize = 10_000;
/// Default number of seeds per cell.
pub const DEFAULT_SEEDS: usize = 5;

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn prob(field: &str, v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::config(field, format!("{v} is not in [0, 1]")))
    }
}

fn resolve(base: &Path, field: &str, path: &str) -> Result<PathBuf> {
    let p = base.join(path);
    if !p.is_file() {
        return Err(Error::config(field, format!("file `{}` does not exist", p.display())));
    }
    Ok(p)
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read config `{}`: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parses config text; `base` anchors relative paths.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(1, |s| line_of(text, s.start));
            Error::Parse { line, message: e.message().to_string() }
        })?;

        let exp = raw.experiment;
        if exp.id.trim().is_empty() {
            return Err(Error::config("experiment.id", "must not be empty"));
        }
        let mitigation = match exp.mitigation.as_deref() {
            Some(m) => m.parse().map_err(|_| Error::config("experiment.mitigation", format!("unknown value `{m}`")))?,
            None => Mitigation::None,
        };
        let seeds = exp.seeds.unwrap_or(DEFAULT_SEEDS);
        if seeds == 0 {
            return Err(Error::config("experiment.seeds", "must be positive"));
        }
        let n_test = exp.n_test.unwrap_or(DEFAULT_N_TEST);
        if n_test == 0 {
            return Err(Error::config("experiment.n_test", "must be positive"));
        }
        if exp.n_train == Some(0) {
            return Err(Error::config("experiment.n_train", "must be positive"));
        }
        if let Some(grid) = &exp.n_grid {
            if grid.is_empty() {
                return Err(Error::config("experiment.n_grid", "grid is empty"));
            }
            if grid.contains(&0) || grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::config("experiment.n_grid", "must be positive and strictly increasing"));
            }
        }

        let source = Self::parse_source(&raw.distribution, base)?;
        let k = source.num_classes();
        let estimator = Self::parse_estimator(&raw.estimator)?;

        let ch = raw.channel;
        let noise = match ch.kind.as_str() {
            "symmetric" => NoiseKind::Symmetric,
            "shift" => NoiseKind::Shift,
            "binary" => {
                let beta = ch.beta.ok_or_else(|| Error::config("channel.beta", "required for binary noise"))?;
                if k != 2 {
                    return Err(Error::config(
                        "channel.kind",
                        format!("binary noise needs K = 2, distribution has K = {k}"),
                    ));
                }
                NoiseKind::Binary { beta: prob("channel.beta", beta)? }
            }
            other => {
                return Err(Error::config("channel.kind", format!("unknown kind `{other}` (symmetric, shift, binary)")))
            }
        };
        if let Some(alphas) = &ch.alphas {
            if alphas.is_empty() {
                return Err(Error::config("channel.alphas", "grid is empty"));
            }
            for &a in alphas {
                prob("channel.alphas", a)?;
            }
        }
        if let Some(a) = ch.alpha {
            prob("channel.alpha", a)?;
        }

        let output_csv = raw.output.csv.map(|c| base.join(c));

        Ok(ExperimentConfig {
            id: exp.id,
            master_seed: exp.seed,
            source,
            estimator,
            noise,
            alphas: ch.alphas,
            alpha: ch.alpha,
            mitigation,
            n_train: exp.n_train,
            n_grid: exp.n_grid,
            n_test,
            seeds,
            output_csv,
        })
    }

    fn parse_source(raw: &RawDistribution, base: &Path) -> Result<DataSource> {
        let need =
            |name: &str| Error::config(format!("distribution.{name}"), format!("required for kind `{}`", raw.kind));
        let mixture = |g: Result<GaussianMixture>| -> Result<DataSource> {
            let g = g.map_err(|e| Error::config("distribution", e.to_string()))?;
            Ok(DataSource::Truth(Arc::new(g) as Arc<dyn GroundTruth>))
        };
        match raw.kind.as_str() {
            "circle" => {
                let k = raw.k.ok_or_else(|| need("k"))?;
                if k < 2 {
                    return Err(Error::config("distribution.k", "must be at least 2"));
                }
                mixture(GaussianMixture::circle(k, raw.radius.unwrap_or(3.0), raw.variance.unwrap_or(1.0)))
            }
            "mixture" => {
                let priors = raw.priors.as_ref().ok_or_else(|| need("priors"))?;
                let means = raw.means.as_ref().ok_or_else(|| need("means"))?;
                let vars = raw.variances.as_ref().ok_or_else(|| need("variances"))?;
                if means.len() != priors.len() || vars.len() != priors.len() {
                    return Err(Error::config(
                        "distribution",
                        "priors, means and variances must have one entry per class",
                    ));
                }
                let components = priors
                    .iter()
                    .zip(means)
                    .zip(vars)
                    .map(|((&prior, mean), var)| Component { prior, mean: mean.clone(), var: var.clone() })
                    .collect();
                mixture(GaussianMixture::new(components))
            }
            "discrete" => {
                let path = resolve(base, "distribution.path", raw.path.as_ref().ok_or_else(|| need("path"))?)?;
                let text = std::fs::read_to_string(&path)?;
                let d = DiscreteJointDistribution::from_text(&text)
                    .map_err(|e| Error::config("distribution.path", format!("{}: {e}", path.display())))?;
                Ok(DataSource::Truth(Arc::new(d)))
            }
            "dataset" => {
                let path = resolve(base, "distribution.path", raw.path.as_ref().ok_or_else(|| need("path"))?)?;
                let text = std::fs::read_to_string(&path)?;
                let ds = Dataset::from_text(&text, &path.display().to_string())
                    .map_err(|e| Error::config("distribution.path", format!("{}: {e}", path.display())))?;
                Ok(DataSource::Sample(Arc::new(ds)))
            }
            other => Err(Error::config(
                "distribution.kind",
                format!("unknown kind `{other}` (circle, mixture, discrete, dataset)"),
            )),
        }
    }

    fn parse_estimator(raw: &RawEstimator) -> Result<EstimatorSpec> {
        match raw.family.as_str() {
            "knn" => {
                if raw.k_neighbors == Some(0) {
                    return Err(Error::config("estimator.k_neighbors", "must be positive"));
                }
                Ok(EstimatorSpec::Knn { k_neighbors: raw.k_neighbors })
            }
            "histogram" => {
                if let Some(h) = raw.bin_width {
                    if !(h > 0.0 && h.is_finite()) {
                        return Err(Error::config("estimator.bin_width", "must be positive"));
                    }
                }
                let empty_cell = match raw.empty_cell.as_deref() {
                    None | Some("uniform") => EmptyCellPolicy::Uniform,
                    Some("global") => EmptyCellPolicy::GlobalFrequency,
                    Some(other) => {
                        return Err(Error::config(
                            "estimator.empty_cell",
                            format!("unknown policy `{other}` (uniform, global)"),
                        ))
                    }
                };
                Ok(EstimatorSpec::Histogram { bin_width: raw.bin_width, empty_cell })
            }
            "mlp" => {
                let d = MlpConfig::default();
                let cfg = MlpConfig {
                    hidden: raw.hidden.clone().unwrap_or(d.hidden),
                    learning_rate: raw.learning_rate.unwrap_or(d.learning_rate),
                    batch_size: raw.batch_size.unwrap_or(d.batch_size),
                    epochs: raw.epochs.unwrap_or(d.epochs),
                    momentum: raw.momentum.unwrap_or(d.momentum),
                    init_gain: raw.init_gain.unwrap_or(d.init_gain),
                };
                cfg.validate()?;
                Ok(EstimatorSpec::Mlp(cfg))
            }
            "oracle" => Ok(EstimatorSpec::Oracle),
            other => Err(Error::config(
                "estimator.family",
                format!("unknown family `{other}` (knn, histogram, mlp, oracle)"),
            )),
        }
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let alphas = self.alphas.clone().unwrap_or_else(|| match self.noise {
            NoiseKind::Symmetric => super::DEFAULT_SYMMETRIC_GRID.to_vec(),
            _ => super::DEFAULT_CLASS_DEPENDENT_GRID.to_vec(),
        });
        let n_train = self.n_train.ok_or_else(|| Error::config("experiment.n_train", "required for a sweep"))?;
        Ok(SweepSpec {
            experiment_id: self.id.clone(),
            source: self.source.clone(),
            estimator: self.estimator.clone(),
            noise: self.noise,
            alphas,
            mitigation: self.mitigation,
            n_train,
            n_test: self.n_test,
            seeds: self.seeds,
            master_seed: self.master_seed,
        })
    }

    pub fn consistency_spec(&self) -> Result<ConsistencySpec> {
        let n_grid =
            self.n_grid.clone().ok_or_else(|| Error::config("experiment.n_grid", "required for a consistency run"))?;
        let alpha = match (self.alpha, &self.alphas) {
            (Some(a), _) => a,
            (None, Some(grid)) if grid.len() == 1 => grid[0],
            _ => return Err(Error::config("channel.alpha", "required for a consistency run")),
        };
        Ok(ConsistencySpec {
            experiment_id: self.id.clone(),
            source: self.source.clone(),
            estimator: self.estimator.clone(),
            noise: self.noise,
            alpha,
            mitigation: self.mitigation,
            n_grid,
            n_test: self.n_test,
            seeds: self.seeds,
            master_seed: self.master_seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
[experiment]
id = "fig1"
seed = 42
n_train = 2000
n_test = 500
seeds = 3

[distribution]
kind = "circle"
k = 10

[estimator]
family = "knn"

[channel]
kind = "symmetric"
alphas = [0, 0.05, 0.1, 0.15, 0.2, 0.4, 0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95, 1]
"#;

    #[test]
    fn parses_basic_sweep() {
        let cfg = ExperimentConfig::parse(BASIC, Path::new(".")).unwrap();
        let spec = cfg.sweep_spec().unwrap();
        assert_eq!(spec.alphas.len(), 14);
        assert_eq!(spec.seeds, 3);
        assert_eq!(spec.source.num_classes(), 10);
        assert!(cfg.consistency_spec().is_err());
    }

    #[test]
    fn class_dependent_grid_accepted() {
        let text = BASIC.replace("kind = \"symmetric\"", "kind = \"shift\"").replace(
            "alphas = [0, 0.05, 0.1, 0.15, 0.2, 0.4, 0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95, 1]",
            "alphas = [0, 0.2, 0.3, 0.45, 0.55, 0.6, 0.8]",
        );
        let spec = ExperimentConfig::parse(&text, Path::new(".")).unwrap().sweep_spec().unwrap();
        assert_eq!(spec.alphas, vec![0.0, 0.2, 0.3, 0.45, 0.55, 0.6, 0.8]);
        assert_eq!(spec.noise, NoiseKind::Shift);
    }

    fn field_of(text: &str) -> String {
        match ExperimentConfig::parse(text, Path::new(".")) {
            Err(Error::Config { field, .. }) => field,
            Err(e) => format!("{e}"),
            Ok(_) => "ok".into(),
        }
    }

    #[test]
    fn field_level_errors() {
        assert_eq!(field_of(&BASIC.replace("alphas = [0,", "alphas = [1.5,")), "channel.alphas");
        assert_eq!(field_of(&BASIC.replace("k = 10", "k = 1")), "distribution.k");
        assert_eq!(field_of(&BASIC.replace("family = \"knn\"", "family = \"svm\"")), "estimator.family");
        assert_eq!(field_of(&BASIC.replace("seeds = 3", "seeds = 0")), "experiment.seeds");
        assert_eq!(
            field_of(&BASIC.replace("kind = \"circle\"", "kind = \"discrete\"\npath = \"missing.txt\"")),
            "distribution.path"
        );
        assert_eq!(field_of(&BASIC.replace("kind = \"symmetric\"", "kind = \"binary\"")), "channel.beta");
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let text = BASIC.replace("seeds = 3", "seeds = = 3");
        match ExperimentConfig::parse(&text, Path::new(".")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("{:?}", other.err()),
        }
        let text = BASIC.replace("seeds = 3", "sedes = 3");
        assert!(matches!(ExperimentConfig::parse(&text, Path::new(".")), Err(Error::Parse { .. })));
    }

    #[test]
    fn consistency_requires_grid() {
        let text = BASIC
            .replace("n_train = 2000", "")
            .replace("alphas = [0, 0.05, 0.1, 0.15, 0.2, 0.4, 0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95, 1]", "alpha = 0.3");
        let cfg = ExperimentConfig::parse(&text, Path::new(".")).unwrap();
        assert!(matches!(cfg.consistency_spec(), Err(Error::Config { ref field, .. }) if field == "experiment.n_grid"));
        let cfg =
            ExperimentConfig::parse(&text.replace("seeds = 3", "seeds = 3\nn_grid = [100, 1000]"), Path::new("."))
                .unwrap();
        assert_eq!(cfg.consistency_spec().unwrap().alpha, 0.3);
    }
}
