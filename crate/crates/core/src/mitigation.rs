//! Posterior corrections for a known noise channel.
//!
//! The wrapped estimate keeps the inner estimator's metadata; the correction
//! itself is recorded separately in each report.
//!
//! Both wrappers map the wrapped estimator's output back towards the clean
//! posterior, then clip negative entries and renormalise, since a
//! finite-sample estimate can land outside the image of the channel.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimators::{PosteriorEstimate, PosteriorModel};
use crate::noise_channel::{breakdown_threshold, invert_symmetric_unchecked, TransitionMatrix};
use crate::simplex;

/// Correction applied on top of a fitted estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mitigation {
    #[default]
    None,
    KnownSymmetric,
    Backward,
}

impl Mitigation {
    pub fn name(&self) -> &'static str {
        match self {
            Mitigation::None => "none",
            Mitigation::KnownSymmetric => "known-symmetric",
            Mitigation::Backward => "backward",
        }
    }

    /// Wraps `est` for a channel. `None` returns the estimator unchanged.
    pub fn apply(&self, est: PosteriorEstimate, channel: &TransitionMatrix) -> Result<PosteriorEstimate> {
        match self {
            Mitigation::None => Ok(est),
            Mitigation::KnownSymmetric => {
                let alpha = match channel.kind() {
                    crate::noise_channel::ChannelKind::Symmetric { alpha } => alpha,
                    _ => {
                        return Err(Error::Domain(format!(
                            "known-symmetric correction needs a symmetric channel, got {channel}"
                        )))
                    }
                };
                correct_known_symmetric(est, alpha, channel.k())
            }
            Mitigation::Backward => correct_backward(est, channel),
        }
    }
}

impl fmt::Display for Mitigation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl serde::Serialize for Mitigation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for Mitigation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Mitigation::None),
            "known-symmetric" => Ok(Mitigation::KnownSymmetric),
            "backward" => Ok(Mitigation::Backward),
            other => Err(Error::config(
                "mitigation",
                format!("unknown value `{other}` (expected none, known-symmetric or backward)"),
            )),
        }
    }
}

struct KnownSymmetric {
    inner: PosteriorEstimate,
    alpha: f64,
    k: usize,
}

impl PosteriorModel for KnownSymmetric {
    fn num_classes(&self) -> usize {
        self.k
    }

    fn posterior(&self, x: &[f64]) -> Result<Vec<f64>> {
        let q = self.inner.predict(x)?;
        Ok(simplex::clip_renormalize(invert_symmetric_unchecked(&q, self.alpha, self.k)))
    }
}

/// Undoes symmetric noise of known level `alpha` on every output.
pub fn correct_known_symmetric(est: PosteriorEstimate, alpha: f64, k: usize) -> Result<PosteriorEstimate> {
    let threshold = breakdown_threshold(k)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidProbability { name: "alpha", value: alpha });
    }
    if alpha >= threshold {
        return Err(Error::AboveThreshold { alpha, k, threshold });
    }
    if est.num_classes() != k {
        return Err(Error::DimensionMismatch { expected: k, got: est.num_classes() });
    }
    let meta = est.meta().clone();
    Ok(PosteriorEstimate::new(KnownSymmetric { inner: est, alpha, k }, meta))
}

struct Backward {
    inner: PosteriorEstimate,
    inverse: Vec<Vec<f64>>,
}

impl PosteriorModel for Backward {
    fn num_classes(&self) -> usize {
        self.inverse.len()
    }

    fn posterior(&self, x: &[f64]) -> Result<Vec<f64>> {
        let q = self.inner.predict(x)?;
        let k = self.inverse.len();
        let mut p = vec![0.0; k];
        for (qi, row) in q.iter().zip(&self.inverse) {
            for (pj, a) in p.iter_mut().zip(row) {
                *pj += qi * a;
            }
        }
        Ok(simplex::clip_renormalize(p))
    }
}

/// Right-multiplies every output by `A^{-1}`.
pub fn correct_backward(est: PosteriorEstimate, channel: &TransitionMatrix) -> Result<PosteriorEstimate> {
    if est.num_classes() != channel.k() {
        return Err(Error::DimensionMismatch { expected: channel.k(), got: est.num_classes() });
    }
    let inverse = channel.inverse()?;
    let meta = est.meta().clone();
    Ok(PosteriorEstimate::new(Backward { inner: est, inverse }, meta))
}
