//! Risk and posterior-consistency metrics, exact verification procedures and
//! noise / sample-size sweeps.

mod sweep;
mod verify;

pub use sweep::{
    consistency_trend, consistency_trend_cells, summarize_by_n, sweep_noise, sweep_noise_cells, CellError,
    ConsistencySpec, DataSource, NoiseKind, SweepSpec, TrendPoint,
};
pub use verify::{
    peaked_discrete, shift_crossover, sub_threshold_grid, threshold_degeneracy, verify_lugosi_bound, verify_theorem1,
    Disagreement, LugosiReport, LugosiViolation, ShiftCrossoverReport, ShiftCrossoverRow, Theorem1Report,
    VERIFY_SUPPORT_SIZE,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{DiscreteJointDistribution, GroundTruth};
use crate::error::{Error, Result};
use crate::estimators::PosteriorEstimate;
use crate::mitigation::Mitigation;
use crate::seeding::Rng;
use crate::simplex;

/// One experiment cell. `NaN` marks quantities that need a ground-truth
/// posterior the data source does not have.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskReport {
    pub experiment_id: String,
    pub seed: u64,
    pub k: usize,
    pub d: usize,
    pub distribution: String,
    pub noise_kind: String,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub n_train: usize,
    pub estimator: String,
    pub mitigation: Mitigation,
    pub risk: f64,
    /// Binomial standard error for Monte Carlo risks, 0 for exact ones.
    pub risk_se: f64,
    pub bayes_risk: f64,
    pub excess_risk: f64,
    pub l1_posterior_error: f64,
    pub l2_posterior_error: f64,
}

impl RiskReport {
    /// Checks the field invariants; used by tests and the CLI before writing.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Domain(format!("invalid risk report: {m}")));
        if !(0.0..=1.0).contains(&self.risk) {
            return fail(format!("risk {} outside [0, 1]", self.risk));
        }
        if !self.bayes_risk.is_nan() && (self.excess_risk - (self.risk - self.bayes_risk)).abs() > 1e-12 {
            return fail("excess risk does not equal risk - bayes risk".into());
        }
        if self.l1_posterior_error < 0.0 || self.l2_posterior_error < 0.0 {
            return fail("negative posterior error".into());
        }
        Ok(())
    }
}

/// Exact risk of `classifier` against the clean labels of a discrete
/// distribution: `sum_m w_m (1 - p_m[g(x_m)])`.
pub fn conditional_risk_exact<F>(classifier: F, dist: &DiscreteJointDistribution) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<usize>,
{
    let k = dist.posteriors()[0].len();
    let mut risk = 0.0;
    for ((x, w), p) in dist.points().iter().zip(dist.weights()).zip(dist.posteriors()) {
        let c = classifier(x)?;
        if c >= k {
            return Err(Error::Domain(format!("classifier returned class {} outside 1..={k}", c + 1)));
        }
        risk += w * (1.0 - p[c]);
    }
    Ok(risk)
}

/// Fraction of `m` fresh clean draws that `classifier` gets wrong, with its
/// binomial standard error.
pub fn conditional_risk_mc<F>(classifier: F, dist: &dyn GroundTruth, m: usize, rng: &mut Rng) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> Result<usize> + Sync,
{
    if m < 100 {
        return Err(Error::Domain(format!("Monte Carlo size must be at least 100, got {m}")));
    }
    let test = dist.sample(m, rng);
    let wrong = test
        .features
        .par_iter()
        .zip(&test.labels)
        .map(|(x, &y)| classifier(x).map(|c| (c != y) as usize))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(binomial(wrong, m))
}

pub(crate) fn binomial(wrong: usize, m: usize) -> (f64, f64) {
    let r = wrong as f64 / m as f64;
    (r, (r * (1.0 - r) / m as f64).sqrt())
}

/// Expected total absolute and squared deviation between two posterior maps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PosteriorError {
    /// `E sum_k |est_k(X) - target_k(X)|`
    pub l1: f64,
    /// `E sum_k (est_k(X) - target_k(X))^2`
    pub l2: f64,
}

impl PosteriorError {
    /// Both orderings implied by entries lying in [0, 1] and Cauchy-Schwarz:
    /// `l2 <= l1 <= sqrt(K * l2)`.
    pub fn bounds_hold(&self, k: usize) -> bool {
        let slack = 1e-12;
        self.l2 <= self.l1 + slack && self.l1 <= (k as f64 * self.l2).sqrt() + slack
    }
}

/// Posterior error at explicit feature points, each with weight `weights[i]`
/// (uniform when `None`).
pub fn posterior_error_at(
    est: &PosteriorEstimate,
    target: &PosteriorEstimate,
    features: &[Vec<f64>],
    weights: Option<&[f64]>,
) -> Result<PosteriorError> {
    if est.num_classes() != target.num_classes() {
        return Err(Error::DimensionMismatch { expected: target.num_classes(), got: est.num_classes() });
    }
    let per_point = features
        .par_iter()
        .map(|x| {
            let (a, b) = (est.predict(x)?, target.predict(x)?);
            Ok((simplex::l1_distance(&a, &b), simplex::squared_distance(&a, &b)))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = features.len() as f64;
    let (mut l1, mut l2) = (0.0, 0.0);
    for (i, (a, b)) in per_point.into_iter().enumerate() {
        let w = weights.map_or(1.0 / n, |w| w[i]);
        l1 += w * a;
        l2 += w * b;
    }
    Ok(PosteriorError { l1, l2 })
}

/// Posterior error of `est` against `target` under the feature law of
/// `dist`: exact over the support for discrete distributions, otherwise a
/// Monte Carlo mean over `m` draws.
pub fn posterior_l1_error(
    est: &PosteriorEstimate,
    dist: &dyn GroundTruth,
    target: &PosteriorEstimate,
    m: usize,
    rng: &mut Rng,
) -> Result<PosteriorError> {
    if let Some(d) = dist.as_discrete() {
        return posterior_error_at(est, target, d.points(), Some(d.weights()));
    }
    if m < 100 {
        return Err(Error::Domain(format!("Monte Carlo size must be at least 100, got {m}")));
    }
    let draws = dist.sample(m, rng);
    posterior_error_at(est, target, &draws.features, None)
}

/// Multiplier on the Bayes risk reached by the noisy plug-in under binary
/// class-dependent noise of unknown levels: `1 + 2|a - b| / (1 - 2 max(a, b))`.
pub fn lugosi_factor(alpha: f64, beta: f64) -> Result<f64> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidProbability { name, value: v });
        }
    }
    let top = alpha.max(beta);
    if top >= 0.5 {
        return Err(Error::Domain(format!("max(alpha, beta) = {top} must be below 1/2")));
    }
    Ok(1.0 + 2.0 * (alpha - beta).abs() / (1.0 - 2.0 * top))
}
