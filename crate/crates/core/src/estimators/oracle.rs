use std::sync::Arc;

use super::{EstimatorMeta, PosteriorEstimate, PosteriorModel};
use crate::distributions::GroundTruth;
use crate::error::{Error, Result};
use crate::noise_channel::TransitionMatrix;

struct NoisyOracle {
    truth: Arc<dyn GroundTruth>,
    channel: TransitionMatrix,
}

impl PosteriorModel for NoisyOracle {
    fn num_classes(&self) -> usize {
        self.channel.k()
    }

    fn posterior(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.channel.mul_left(&self.truth.posterior(x)?))
    }
}

/// The exact noisy-label posterior `q(x) = p(x) A`: what a consistent
/// estimator trained on labels corrupted by `channel` converges to.
pub fn oracle_noisy_posterior(truth: Arc<dyn GroundTruth>, channel: &TransitionMatrix) -> Result<PosteriorEstimate> {
    if truth.num_classes() != channel.k() {
        return Err(Error::DimensionMismatch { expected: truth.num_classes(), got: channel.k() });
    }
    let meta = EstimatorMeta { family: "oracle".into(), params: channel.to_string(), n_train: 0 };
    Ok(PosteriorEstimate::new(NoisyOracle { truth, channel: channel.clone() }, meta))
}

/// The clean posterior `p(x)` wrapped as an estimator.
pub fn true_posterior(truth: Arc<dyn GroundTruth>) -> PosteriorEstimate {
    let k = truth.num_classes();
    let channel = TransitionMatrix::identity(k).expect("ground truth has at least two classes");
    let meta = EstimatorMeta { family: "truth".into(), params: String::new(), n_train: 0 };
    PosteriorEstimate::new(NoisyOracle { truth, channel }, meta)
}
