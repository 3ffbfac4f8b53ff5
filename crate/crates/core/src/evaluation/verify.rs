//! Exact population-level checks on discrete distributions.

use std::sync::Arc;

use rand::Rng as _;
use serde::Serialize;

use super::conditional_risk_exact;
use crate::distributions::{bayes_risk_exact, random_discrete, DiscreteJointDistribution, GroundTruth};
use crate::error::{Error, Result};
use crate::estimators::oracle_noisy_posterior;
use crate::noise_channel::{breakdown_threshold, TransitionMatrix};
use crate::seeding::{cell_seed, rng_from_seed};
use crate::simplex;

/// Support size of the random distributions drawn by the verifiers.
pub const VERIFY_SUPPORT_SIZE: usize = 50;

/// `0, 0.05, 0.10, ...` strictly below `threshold - 0.01`, then `threshold - 0.01`.
pub fn sub_threshold_grid(k: usize) -> Result<Vec<f64>> {
    let top = breakdown_threshold(k)? - 0.01;
    let mut grid: Vec<f64> = (0..).map(|i| i as f64 * 5.0 / 100.0).take_while(|&a| a < top - 1e-12).collect();
    grid.push(top);
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disagreement {
    pub trial: usize,
    pub alpha: f64,
    /// 1-based support index.
    pub point: usize,
    /// 1-based classes.
    pub bayes_class: usize,
    pub noisy_class: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub k: usize,
    pub trials: usize,
    pub support_size: usize,
    pub seed: u64,
    pub alphas: Vec<f64>,
    /// (trial, alpha, point) triples with a unique true maximiser.
    pub points_checked: usize,
    pub agreements: usize,
    pub disagreements: Vec<Disagreement>,
    /// Triples skipped because the true posterior has tied maxima.
    pub tied_points: usize,
}

impl Theorem1Report {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// For every trial, draws a random discrete distribution and checks that the
/// argmax of the exact noisy posterior under symmetric noise equals the
/// Bayes decision at every support point, for every `alpha` in the grid.
pub fn verify_theorem1(k: usize, alphas: &[f64], trials: usize, seed: u64) -> Result<Theorem1Report> {
    let threshold = breakdown_threshold(k)?;
    if let Some(&alpha) = alphas.iter().find(|&&a| !(0.0..threshold).contains(&a)) {
        return Err(Error::AboveThreshold { alpha, k, threshold });
    }
    let channels = alphas.iter().map(|&a| TransitionMatrix::symmetric(k, a)).collect::<Result<Vec<_>>>()?;
    let mut report = Theorem1Report {
        k,
        trials,
        support_size: VERIFY_SUPPORT_SIZE,
        seed,
        alphas: alphas.to_vec(),
        points_checked: 0,
        agreements: 0,
        disagreements: Vec::new(),
        tied_points: 0,
    };
    for trial in 0..trials {
        let dist = random_discrete(k, VERIFY_SUPPORT_SIZE, cell_seed(seed, trial as u64))?;
        let truth: Arc<dyn GroundTruth> = Arc::new(dist.clone());
        for (channel, &alpha) in channels.iter().zip(alphas) {
            let noisy = oracle_noisy_posterior(Arc::clone(&truth), channel)?;
            for (m, (x, p)) in dist.points().iter().zip(dist.posteriors()).enumerate() {
                if simplex::has_tied_max(p) {
                    report.tied_points += 1;
                    continue;
                }
                report.points_checked += 1;
                let bayes = simplex::argmax(p);
                let plug_in = noisy.classify(x)?;
                if bayes == plug_in {
                    report.agreements += 1;
                } else {
                    report.disagreements.push(Disagreement {
                        trial,
                        alpha,
                        point: m + 1,
                        bayes_class: bayes + 1,
                        noisy_class: plug_in + 1,
                    });
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LugosiViolation {
    pub trial: usize,
    pub alpha: f64,
    pub beta: f64,
    pub risk: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LugosiReport {
    pub trials: usize,
    pub support_size: usize,
    pub seed: u64,
    pub violations: Vec<LugosiViolation>,
    /// Largest `risk / bayes_risk` seen over the random (alpha, beta) trials.
    pub max_ratio: f64,
    pub max_ratio_alpha: f64,
    pub max_ratio_beta: f64,
    /// Largest `|risk / bayes_risk - 1|` over trials run with `alpha = beta`.
    pub equal_noise_max_deviation: f64,
}

impl LugosiReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.equal_noise_max_deviation <= 1e-12
    }
}

fn ratio(risk: f64, bayes: f64) -> f64 {
    if bayes > 0.0 {
        risk / bayes
    } else if risk == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// Exact risk of the argmax of the noisy posterior under `channel`.
fn noisy_plug_in_risk(dist: &DiscreteJointDistribution, channel: &TransitionMatrix) -> Result<f64> {
    let noisy = oracle_noisy_posterior(Arc::new(dist.clone()), channel)?;
    conditional_risk_exact(|x| noisy.classify(x), dist)
}

/// Binary check of `risk <= bayes_risk * lugosi_factor(alpha, beta)` for
/// the noisy plug-in with exact noisy posteriors, plus the same number of
/// trials with `alpha = beta`, where the ratio must be 1.
pub fn verify_lugosi_bound(trials: usize, seed: u64) -> Result<LugosiReport> {
    const SUPPORT: usize = 20;
    let mut report = LugosiReport {
        trials,
        support_size: SUPPORT,
        seed,
        violations: Vec::new(),
        max_ratio: 0.0,
        max_ratio_alpha: 0.0,
        max_ratio_beta: 0.0,
        equal_noise_max_deviation: 0.0,
    };
    for trial in 0..trials {
        let trial_seed = cell_seed(seed, trial as u64);
        let dist = random_discrete(2, SUPPORT, trial_seed)?;
        let mut rng = rng_from_seed(!trial_seed);
        let alpha = rng.random_range(0.0..0.5);
        let beta = rng.random_range(0.0..0.5);
        let bayes = bayes_risk_exact(&dist);

        let risk = noisy_plug_in_risk(&dist, &TransitionMatrix::binary(alpha, beta)?)?;
        let bound = bayes * super::lugosi_factor(alpha, beta)?;
        if risk > bound + 1e-12 {
            report.violations.push(LugosiViolation { trial, alpha, beta, risk, bound });
        }
        let r = ratio(risk, bayes);
        if r > report.max_ratio {
            report.max_ratio = r;
            report.max_ratio_alpha = alpha;
            report.max_ratio_beta = beta;
        }

        let equal = noisy_plug_in_risk(&dist, &TransitionMatrix::binary(alpha, alpha)?)?;
        let dev = (ratio(equal, bayes) - 1.0).abs();
        report.equal_noise_max_deviation = report.equal_noise_max_deviation.max(dev);
    }
    Ok(report)
}

/// `m` equally weighted one-dimensional support points; each posterior row
/// puts `max_entry` on a random class and spreads the rest evenly.
pub fn peaked_discrete(k: usize, m: usize, max_entry: f64, seed: u64) -> Result<DiscreteJointDistribution> {
    let _ = breakdown_threshold(k)?;
    let residual = (1.0 - max_entry) / (k - 1) as f64;
    if !(max_entry > residual && max_entry <= 1.0) {
        return Err(Error::Domain(format!("max entry {max_entry} must exceed the residual {residual}")));
    }
    let mut rng = rng_from_seed(seed);
    let posteriors = (0..m)
        .map(|_| {
            let c = rng.random_range(0..k);
            (0..k).map(|j| if j == c { max_entry } else { residual }).collect()
        })
        .collect();
    DiscreteJointDistribution::new((0..m).map(|i| vec![i as f64]).collect(), vec![1.0 / m as f64; m], posteriors)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftCrossoverRow {
    pub alpha: f64,
    pub agreements: usize,
    pub disagreements: usize,
    pub risk: f64,
    pub bayes_risk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftCrossoverReport {
    pub k: usize,
    pub max_entry: f64,
    pub rows: Vec<ShiftCrossoverRow>,
}

/// Decision agreement between the shift-noise plug-in and the Bayes rule,
/// per `alpha`, on a [`peaked_discrete`] distribution.
pub fn shift_crossover(dist: &DiscreteJointDistribution, alphas: &[f64]) -> Result<ShiftCrossoverReport> {
    let k = dist.posteriors()[0].len();
    let truth: Arc<dyn GroundTruth> = Arc::new(dist.clone());
    let bayes_risk = bayes_risk_exact(dist);
    let max_entry = dist.posteriors().iter().map(|p| p[simplex::argmax(p)]).fold(0.0, f64::max);
    let rows = alphas
        .iter()
        .map(|&alpha| {
            let noisy = oracle_noisy_posterior(Arc::clone(&truth), &TransitionMatrix::shift(k, alpha)?)?;
            let mut agreements = 0;
            for (x, p) in dist.points().iter().zip(dist.posteriors()) {
                agreements += (noisy.classify(x)? == simplex::argmax(p)) as usize;
            }
            let risk = conditional_risk_exact(|x| noisy.classify(x), dist)?;
            Ok(ShiftCrossoverRow {
                alpha,
                agreements,
                disagreements: dist.support_size() - agreements,
                risk,
                bayes_risk,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShiftCrossoverReport { k, max_entry, rows })
}

/// At `alpha = (K-1)/K` the noisy posterior is uniform everywhere. Returns the
/// exact risk of the noisy plug-in and of the constant class-1 rule, which
/// must coincide.
pub fn threshold_degeneracy(dist: &DiscreteJointDistribution) -> Result<(f64, f64)> {
    let k = dist.posteriors()[0].len();
    let channel = TransitionMatrix::symmetric(k, breakdown_threshold(k)?)?;
    let plug_in = noisy_plug_in_risk(dist, &channel)?;
    let constant = conditional_risk_exact(|_| Ok(0), dist)?;
    Ok((plug_in, constant))
}
