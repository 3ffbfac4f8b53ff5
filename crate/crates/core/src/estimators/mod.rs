//! Posterior estimators and the plug-in (argmax) classifier built on them.

mod histogram;
mod kdtree;
mod knn;
mod mlp;
mod oracle;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

pub use histogram::{default_bin_width, fit_histogram, EmptyCellPolicy};
pub use knn::{default_neighbors, fit_knn};
pub use mlp::{fit_mlp, MlpConfig};
pub use oracle::{oracle_noisy_posterior, true_posterior};

use crate::distributions::{Dataset, GroundTruth};
use crate::error::{Error, Result};
use crate::noise_channel::TransitionMatrix;
use crate::seeding::Rng;
use crate::simplex;

/// A fitted map from features to a probability vector over the classes.
pub trait PosteriorModel: Send + Sync {
    fn num_classes(&self) -> usize;
    fn posterior(&self, x: &[f64]) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorMeta {
    pub family: String,
    pub params: String,
    pub n_train: usize,
}

impl fmt::Display for EstimatorMeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.params.is_empty() {
            write!(f, "{}", self.family)
        } else {
            write!(f, "{}({})", self.family, self.params)
        }
    }
}

/// Immutable fitted estimator plus a description of how it was built.
#[derive(Clone)]
pub struct PosteriorEstimate {
    model: Arc<dyn PosteriorModel>,
    meta: EstimatorMeta,
}

impl fmt::Debug for PosteriorEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PosteriorEstimate").field("meta", &self.meta).finish()
    }
}

impl PosteriorEstimate {
    pub fn new(model: impl PosteriorModel + 'static, meta: EstimatorMeta) -> Self {
        PosteriorEstimate { model: Arc::new(model), meta }
    }

    pub fn meta(&self) -> &EstimatorMeta {
        &self.meta
    }

    pub fn num_classes(&self) -> usize {
        self.model.num_classes()
    }

    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.model.posterior(x)
    }

    /// Predictions for many queries, computed in parallel, returned in order.
    pub fn predict_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        xs.par_iter().map(|x| self.predict(x)).collect()
    }

    pub fn classify(&self, x: &[f64]) -> Result<usize> {
        classify_argmax(self, x)
    }
}

/// Plug-in decision: lowest-index argmax of the estimated posterior.
pub fn classify_argmax(est: &PosteriorEstimate, x: &[f64]) -> Result<usize> {
    Ok(simplex::argmax(&est.predict(x)?))
}

/// Which estimator to fit, with its hyperparameters. `None` means the
/// data-size-dependent default.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorSpec {
    Knn {
        k_neighbors: Option<usize>,
    },
    Histogram {
        bin_width: Option<f64>,
        empty_cell: EmptyCellPolicy,
    },
    Mlp(MlpConfig),
    /// The exact noisy posterior of the generating distribution; ignores the data.
    Oracle,
}

impl EstimatorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorSpec::Knn { .. } => "knn",
            EstimatorSpec::Histogram { .. } => "histogram",
            EstimatorSpec::Mlp(_) => "mlp",
            EstimatorSpec::Oracle => "oracle",
        }
    }

    /// Fits on `train`. The oracle needs the ground truth and the channel that
    /// produced the training labels.
    pub fn fit(
        &self,
        train: &Dataset,
        truth: Option<&Arc<dyn GroundTruth>>,
        channel: &TransitionMatrix,
        rng: &mut Rng,
    ) -> Result<PosteriorEstimate> {
        match self {
            EstimatorSpec::Knn { k_neighbors } => {
                fit_knn(train, k_neighbors.unwrap_or_else(|| default_neighbors(train.len())))
            }
            EstimatorSpec::Histogram { bin_width, empty_cell } => {
                let h = bin_width.unwrap_or_else(|| default_bin_width(train.len(), train.d));
                fit_histogram(train, h, *empty_cell)
            }
            EstimatorSpec::Mlp(config) => fit_mlp(train, config, rng),
            EstimatorSpec::Oracle => {
                let truth = truth.ok_or_else(|| {
                    Error::Domain("the oracle estimator needs a distribution with known posteriors".into())
                })?;
                oracle_noisy_posterior(Arc::clone(truth), channel)
            }
        }
    }
}
