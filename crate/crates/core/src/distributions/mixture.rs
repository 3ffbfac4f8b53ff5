use rand::Rng as _;
use rand_distr::StandardNormal;

use super::discrete::draw_categorical;
use super::{Dataset, GroundTruth, Provenance};
use crate::error::{Error, Result};
use crate::seeding::Rng;
use crate::simplex;

/// One class of a [`GaussianMixture`]: prior weight, mean, and diagonal variances.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub prior: f64,
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

/// Mixture of axis-aligned Gaussians, one component per class. The class
/// label of a draw is the component it came from.
#[derive(Debug, Clone)]
pub struct GaussianMixture {
    components: Vec<Component>,
    priors: Vec<f64>,
    cum_priors: Vec<f64>,
    d: usize,
    /// log prior - 0.5 * sum log(2 pi var), per component.
    log_norm: Vec<f64>,
}

impl GaussianMixture {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let k = components.len();
        if k < 2 {
            return Err(Error::InvalidClassCount(k));
        }
        let priors: Vec<f64> = components.iter().map(|c| c.prior).collect();
        simplex::check(&priors, simplex::INPUT_TOL)?;
        let d = components[0].mean.len();
        if d == 0 {
            return Err(Error::Domain("mixture components need at least one dimension".into()));
        }
        for (i, c) in components.iter().enumerate() {
            if c.mean.len() != d || c.var.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: c.mean.len().min(c.var.len()) });
            }
            if c.var.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                return Err(Error::Domain(format!("component {} has a non-positive variance", i + 1)));
            }
            if c.mean.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("component {} has a non-finite mean", i + 1)));
            }
        }
        let log_norm = components
            .iter()
            .map(|c| {
                let det: f64 = c.var.iter().map(|v| (2.0 * std::f64::consts::PI * v).ln()).sum();
                c.prior.ln() - 0.5 * det
            })
            .collect();
        let cum_priors = priors
            .iter()
            .scan(0.0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Ok(GaussianMixture { components, priors, cum_priors, d, log_norm })
    }

    /// `k` equal-prior components with means evenly spaced on a circle of
    /// `radius` in the first two coordinates and isotropic `variance`.
    pub fn circle(k: usize, radius: f64, variance: f64) -> Result<Self> {
        let components = (0..k)
            .map(|i| {
                let angle = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                Component {
                    prior: 1.0 / k as f64,
                    mean: vec![radius * angle.cos(), radius * angle.sin()],
                    var: vec![variance; 2],
                }
            })
            .collect();
        Self::new(components)
    }

    /// The 10-class benchmark: circle of radius 3, unit variances, equal priors.
    pub fn default_benchmark() -> Self {
        Self::circle(10, 3.0, 1.0).expect("benchmark parameters are valid")
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }
}

impl GroundTruth for GaussianMixture {
    fn num_classes(&self) -> usize {
        self.components.len()
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn posterior(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: x.len() });
        }
        let logs: Vec<f64> = self
            .components
            .iter()
            .zip(&self.log_norm)
            .map(|(c, &norm)| {
                let quad: f64 =
                    x.iter().zip(&c.mean).zip(&c.var).map(|((xi, mi), vi)| (xi - mi) * (xi - mi) / vi).sum();
                norm - 0.5 * quad
            })
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let unnorm: Vec<f64> = logs.iter().map(|&l| (l - top).exp()).collect();
        let total: f64 = unnorm.iter().sum();
        Ok(unnorm.into_iter().map(|v| v / total).collect())
    }

    fn sample(&self, n: usize, rng: &mut Rng) -> Dataset {
        let mut features = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let y = draw_categorical(&self.priors, &self.cum_priors, rng.random());
            let c = &self.components[y];
            let x =
                c.mean.iter().zip(&c.var).map(|(m, v)| m + v.sqrt() * rng.sample::<f64, _>(StandardNormal)).collect();
            features.push(x);
            labels.push(y);
        }
        Dataset { features, labels, k: self.components.len(), d: self.d, provenance: Provenance::Clean }
    }

    fn describe(&self) -> String {
        format!("gaussian-mixture(K={}, d={})", self.components.len(), self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::rng_from_seed;

    fn one_d(priors: [f64; 2], means: [f64; 2]) -> GaussianMixture {
        GaussianMixture::new(
            priors.iter().zip(means).map(|(&p, m)| Component { prior: p, mean: vec![m], var: vec![1.0] }).collect(),
        )
        .unwrap()
    }

    #[test]
    fn symmetric_midpoint_posterior() {
        let g = one_d([0.5, 0.5], [0.0, 1.0]);
        let p = g.posterior(&[0.5]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);

        let g = GaussianMixture::circle(2, 3.0, 1.0).unwrap();
        let p = g.posterior(&[0.0, 7.0]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn posterior_matches_density_ratio() {
        // Direct density-ratio oracle at x = 2 with means 0 and 1, unit variances.
        let g = one_d([0.3, 0.7], [0.0, 1.0]);
        let f = |x: f64, m: f64| (-(x - m) * (x - m) / 2.0).exp();
        let (a, b) = (0.3 * f(2.0, 0.0), 0.7 * f(2.0, 1.0));
        let p = g.posterior(&[2.0]).unwrap();
        assert!((p[0] - a / (a + b)).abs() < 1e-14);
    }

    #[test]
    fn far_points_do_not_underflow() {
        let g = one_d([0.5, 0.5], [0.0, 1.0]);
        let p = g.posterior(&[1e3]).unwrap();
        assert!(p.iter().all(|v| v.is_finite()));
        assert!((p[1] - 1.0).abs() < 1e-12);
        let p = g.posterior(&[-1e3]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_prior_labels() {
        let g = one_d([1.0, 0.0], [0.0, 1.0]);
        let ds = g.sample(100, &mut rng_from_seed(4));
        assert!(ds.labels.iter().all(|&y| y == 0));
        assert_eq!(g.posterior(&[5.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn rejects_invalid() {
        assert!(GaussianMixture::new(vec![Component { prior: 1.0, mean: vec![0.0], var: vec![1.0] }]).is_err());
        let bad_var = GaussianMixture::new(vec![
            Component { prior: 0.5, mean: vec![0.0], var: vec![0.0] },
            Component { prior: 0.5, mean: vec![1.0], var: vec![1.0] },
        ]);
        assert!(bad_var.is_err());
        let bad_prior = GaussianMixture::new(vec![
            Component { prior: 0.5, mean: vec![0.0], var: vec![1.0] },
            Component { prior: 0.6, mean: vec![1.0], var: vec![1.0] },
        ]);
        assert!(bad_prior.is_err());
    }

    #[test]
    fn benchmark_shape() {
        let g = GaussianMixture::default_benchmark();
        assert_eq!(g.num_classes(), 10);
        assert_eq!(g.dim(), 2);
        for c in g.components() {
            let r = (c.mean[0].powi(2) + c.mean[1].powi(2)).sqrt();
            assert!((r - 3.0).abs() < 1e-12);
            assert_eq!(c.var, vec![1.0, 1.0]);
            assert!((c.prior - 0.1).abs() < 1e-15);
        }
    }
}
