use std::collections::HashMap;

use rand::Rng as _;
use rand_distr::Exp1;

use super::{Dataset, GroundTruth, Provenance};
use crate::error::{Error, Result};
use crate::seeding::{rng_from_seed, Rng};
use crate::simplex;

/// Finite-support joint distribution: feature `points[m]` has probability
/// `weights[m]` and class posterior `posteriors[m]`.
#[derive(Debug, Clone)]
pub struct DiscreteJointDistribution {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    posteriors: Vec<Vec<f64>>,
    k: usize,
    d: usize,
    index: HashMap<Vec<u64>, usize>,
    cum_weights: Vec<f64>,
}

fn point_key(x: &[f64]) -> Vec<u64> {
    // +0.0 so that -0.0 and 0.0 name the same point.
    x.iter().map(|v| (v + 0.0).to_bits()).collect()
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .scan(0.0, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Inverse-CDF draw that never lands on a zero-probability entry.
pub(crate) fn draw_categorical(probs: &[f64], cum: &[f64], u: f64) -> usize {
    let total = *cum.last().unwrap();
    let target = u * total;
    let mut i = cum.partition_point(|&c| c <= target);
    if i >= probs.len() {
        i = probs.len() - 1;
    }
    while probs[i] == 0.0 && i > 0 {
        i -= 1;
    }
    while probs[i] == 0.0 {
        i += 1;
    }
    i
}

impl DiscreteJointDistribution {
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>, posteriors: Vec<Vec<f64>>) -> Result<Self> {
        let m = points.len();
        if m == 0 {
            return Err(Error::Domain("discrete distribution needs at least one support point".into()));
        }
        if weights.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: weights.len() });
        }
        if posteriors.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: posteriors.len() });
        }
        simplex::check(&weights, simplex::INPUT_TOL)?;
        let k = posteriors[0].len();
        if k < 2 {
            return Err(Error::InvalidClassCount(k));
        }
        let d = points[0].len();
        let mut index = HashMap::with_capacity(m);
        for (i, (x, p)) in points.iter().zip(&posteriors).enumerate() {
            if x.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: x.len() });
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("support point {} is not finite", i + 1)));
            }
            if p.len() != k {
                return Err(Error::DimensionMismatch { expected: k, got: p.len() });
            }
            simplex::check(p, simplex::INPUT_TOL)
                .map_err(|e| Error::Domain(format!("posterior of support point {}: {e}", i + 1)))?;
            if index.insert(point_key(x), i).is_some() {
                return Err(Error::Domain(format!("support point {} duplicates an earlier point", i + 1)));
            }
        }
        let cum_weights = cumulative(&weights);
        Ok(DiscreteJointDistribution { points, weights, posteriors, k, d, index, cum_weights })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn posteriors(&self) -> &[Vec<f64>] {
        &self.posteriors
    }

    pub fn support_size(&self) -> usize {
        self.points.len()
    }

    /// Support index of `x`, if it is a support point.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        self.index.get(&point_key(x)).copied()
    }

    /// Same distribution with support points reordered by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Self::new(
            perm.iter().map(|&i| self.points[i].clone()).collect(),
            perm.iter().map(|&i| self.weights[i]).collect(),
            perm.iter().map(|&i| self.posteriors[i].clone()).collect(),
        )
    }
}

impl GroundTruth for DiscreteJointDistribution {
    fn num_classes(&self) -> usize {
        self.k
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn posterior(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.locate(x)
            .map(|m| self.posteriors[m].clone())
            .ok_or_else(|| Error::Domain(format!("{x:?} is not a support point")))
    }

    fn sample(&self, n: usize, rng: &mut Rng) -> Dataset {
        let mut features = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let m = draw_categorical(&self.weights, &self.cum_weights, rng.random());
            let post = &self.posteriors[m];
            let y = draw_categorical(post, &cumulative(post), rng.random());
            features.push(self.points[m].clone());
            labels.push(y);
        }
        Dataset { features, labels, k: self.k, d: self.d, provenance: Provenance::Clean }
    }

    fn describe(&self) -> String {
        format!("discrete(M={}, K={}, d={})", self.points.len(), self.k, self.d)
    }

    fn as_discrete(&self) -> Option<&DiscreteJointDistribution> {
        Some(self)
    }
}

fn flat_dirichlet(len: usize, rng: &mut Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Random `k`-class distribution on `m` one-dimensional integer support
/// points, with weights and posterior rows drawn from a flat Dirichlet.
pub fn random_discrete(k: usize, m: usize, seed: u64) -> Result<DiscreteJointDistribution> {
    if k < 2 {
        return Err(Error::InvalidClassCount(k));
    }
    if m == 0 {
        return Err(Error::Domain("support size must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let weights = flat_dirichlet(m, &mut rng);
    let posteriors = (0..m).map(|_| flat_dirichlet(k, &mut rng)).collect();
    let points = (0..m).map(|i| vec![i as f64]).collect();
    DiscreteJointDistribution::new(points, weights, posteriors)
}
