//! Ground-truth joint distributions with exact posterior access.

mod dataset;
mod discrete;
mod format;
mod mixture;

pub use dataset::{Dataset, Provenance};
pub use discrete::{random_discrete, DiscreteJointDistribution};
pub use mixture::{Component, GaussianMixture};

use crate::error::Result;
use crate::seeding::Rng;
use crate::simplex;

/// A distribution of (feature, label) pairs whose class posteriors are known.
pub trait GroundTruth: Send + Sync {
    fn num_classes(&self) -> usize;
    fn dim(&self) -> usize;
    /// Exact `P(Y = k | X = x)` for every class `k`.
    fn posterior(&self, x: &[f64]) -> Result<Vec<f64>>;
    /// Draws `n` i.i.d. labelled points.
    fn sample(&self, n: usize, rng: &mut Rng) -> Dataset;
    fn describe(&self) -> String;

    /// Downcast hook for code paths that can use exact expectations.
    fn as_discrete(&self) -> Option<&DiscreteJointDistribution> {
        None
    }
}

/// The Bayes decision at `x`, ties to the lowest class index.
pub fn bayes_classify(dist: &dyn GroundTruth, x: &[f64]) -> Result<usize> {
    Ok(simplex::argmax(&dist.posterior(x)?))
}

/// `sum_m w_m (1 - max_k p_k(x_m))`, computed exactly over the support.
pub fn bayes_risk_exact(dist: &DiscreteJointDistribution) -> f64 {
    dist.weights().iter().zip(dist.posteriors()).map(|(w, p)| w * (1.0 - p[simplex::argmax(p)])).sum()
}

/// Monte Carlo Bayes risk: mean of `1 - max_k p_k(X)` over `m` feature draws,
/// with the standard error of that mean.
pub fn bayes_risk_mc(dist: &dyn GroundTruth, m: usize, rng: &mut Rng) -> Result<(f64, f64)> {
    if m < 100 {
        return Err(crate::Error::Domain(format!("Monte Carlo size must be at least 100, got {m}")));
    }
    let draws = dist.sample(m, rng);
    let losses = draws
        .features
        .iter()
        .map(|x| dist.posterior(x).map(|p| 1.0 - p[simplex::argmax(&p)]))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean_and_se(&losses))
}

/// Sample mean and standard error of the mean (unbiased variance).
pub(crate) fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
