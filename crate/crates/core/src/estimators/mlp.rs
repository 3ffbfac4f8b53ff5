//! Fully connected ReLU network with a softmax head, trained by mini-batch
//! SGD with momentum on cross-entropy.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;

use super::{EstimatorMeta, PosteriorEstimate, PosteriorModel};
use crate::distributions::Dataset;
use crate::error::{Error, Result};
use crate::seeding::{rng_from_seed, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Heavy-ball coefficient, `v <- momentum * v + grad`.
    pub momentum: f64,
    /// Weights start as `N(0, 1) * init_gain * sqrt(2 / fan_in)`.
    pub init_gain: f64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: vec![64, 64],
            learning_rate: 0.01,
            batch_size: 64,
            epochs: 10,
            momentum: 0.5,
            init_gain: 1.0,
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: &str| Err(Error::config(format!("estimator.{field}"), msg));
        if self.hidden.contains(&0) {
            return bad("hidden", "layer widths must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate", "must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch_size", "must be positive");
        }
        if self.epochs == 0 {
            return bad("epochs", "must be positive");
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad("momentum", "must lie in [0, 1)");
        }
        if !(self.init_gain > 0.0 && self.init_gain.is_finite()) {
            return bad("init_gain", "must be positive");
        }
        Ok(())
    }

    fn describe(&self) -> String {
        let hidden: Vec<String> = self.hidden.iter().map(|h| h.to_string()).collect();
        format!(
            "hidden=[{}] lr={} batch={} epochs={} momentum={}",
            hidden.join(","),
            self.learning_rate,
            self.batch_size,
            self.epochs,
            self.momentum
        )
    }
}

#[derive(Debug, Clone)]
struct Layer {
    inputs: usize,
    outputs: usize,
    /// `outputs x inputs`, row-major.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl Layer {
    fn new(inputs: usize, outputs: usize, gain: f64, rng: &mut Rng) -> Self {
        let scale = gain * (2.0 / inputs as f64).sqrt();
        let weights = (0..inputs * outputs).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
        Layer { inputs, outputs, weights, bias: vec![0.0; outputs] }
    }

    fn forward(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.bias.iter().enumerate().map(|(o, b)| {
            let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
            b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
        }));
    }
}

fn softmax_in_place(z: &mut [f64]) {
    let top = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in z.iter_mut() {
        *v = (*v - top).exp();
        total += *v;
    }
    for v in z.iter_mut() {
        *v /= total;
    }
}

#[derive(Debug, Clone)]
struct Network {
    layers: Vec<Layer>,
}

impl Network {
    /// Activations of every layer, input first; the last entry is the softmax output.
    fn activations(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = Vec::with_capacity(layer.outputs);
            layer.forward(acts.last().unwrap(), &mut z);
            if i + 1 < self.layers.len() {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            } else {
                softmax_in_place(&mut z);
            }
            acts.push(z);
        }
        acts
    }

    fn predict(&self, x: &[f64]) -> Vec<f64> {
        self.activations(x).pop().unwrap()
    }
}

impl PosteriorModel for Network {
    fn num_classes(&self) -> usize {
        self.layers.last().unwrap().outputs
    }

    fn posterior(&self, x: &[f64]) -> Result<Vec<f64>> {
        let d = self.layers[0].inputs;
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.len() });
        }
        Ok(self.predict(x))
    }
}

/// Trains on the labels exactly as given (no reweighting or correction).
///
/// Two independent streams are seeded from `rng`: one for initialisation, one
/// for the per-epoch shuffles. The final batch of an epoch may be short.
pub fn fit_mlp(train: &Dataset, config: &MlpConfig, rng: &mut Rng) -> Result<PosteriorEstimate> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if train.len() < config.batch_size {
        return Err(Error::Domain(format!(
            "training set of {} points is smaller than the batch size {}",
            train.len(),
            config.batch_size
        )));
    }
    let mut init_rng = rng_from_seed(rng.random());
    let mut shuffle_rng = rng_from_seed(rng.random());

    let mut widths = vec![train.d];
    widths.extend(&config.hidden);
    widths.push(train.k);
    let mut net = Network {
        layers: widths.windows(2).map(|w| Layer::new(w[0], w[1], config.init_gain, &mut init_rng)).collect(),
    };
    let mut vel_w: Vec<Vec<f64>> = net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect();
    let mut vel_b: Vec<Vec<f64>> = net.layers.iter().map(|l| vec![0.0; l.bias.len()]).collect();
    let mut grad_w = vel_w.clone();
    let mut grad_b = vel_b.clone();

    let mut order: Vec<usize> = (0..train.len()).collect();
    for epoch in 0..config.epochs {
        order.shuffle(&mut shuffle_rng);
        for (batch_no, batch) in order.chunks(config.batch_size).enumerate() {
            grad_w.iter_mut().for_each(|g| g.fill(0.0));
            grad_b.iter_mut().for_each(|g| g.fill(0.0));
            let mut loss = 0.0;
            for &i in batch {
                let acts = net.activations(&train.features[i]);
                let y = train.labels[i];
                let out = acts.last().unwrap();
                loss -= out[y].max(f64::MIN_POSITIVE).ln();
                // dL/dz for softmax + cross-entropy.
                let mut delta: Vec<f64> = out.clone();
                delta[y] -= 1.0;
                for l in (0..net.layers.len()).rev() {
                    let layer = &net.layers[l];
                    let input = &acts[l];
                    for o in 0..layer.outputs {
                        grad_b[l][o] += delta[o];
                        let gw = &mut grad_w[l][o * layer.inputs..(o + 1) * layer.inputs];
                        for (g, v) in gw.iter_mut().zip(input) {
                            *g += delta[o] * v;
                        }
                    }
                    if l > 0 {
                        let mut prev = vec![0.0; layer.inputs];
                        for (d, row) in delta.iter().zip(layer.weights.chunks_exact(layer.inputs)) {
                            for (p, w) in prev.iter_mut().zip(row) {
                                *p += d * w;
                            }
                        }
                        // ReLU derivative on the previous layer's output.
                        for (p, a) in prev.iter_mut().zip(input) {
                            if *a <= 0.0 {
                                *p = 0.0;
                            }
                        }
                        delta = prev;
                    }
                }
            }
            let scale = 1.0 / batch.len() as f64;
            loss *= scale;
            if !loss.is_finite() {
                return Err(Error::TrainingDiverged { epoch: epoch + 1, batch: batch_no + 1, loss });
            }
            for (l, layer) in net.layers.iter_mut().enumerate() {
                for ((w, v), g) in layer.weights.iter_mut().zip(&mut vel_w[l]).zip(&grad_w[l]) {
                    *v = config.momentum * *v + g * scale;
                    *w -= config.learning_rate * *v;
                }
                for ((b, v), g) in layer.bias.iter_mut().zip(&mut vel_b[l]).zip(&grad_b[l]) {
                    *v = config.momentum * *v + g * scale;
                    *b -= config.learning_rate * *v;
                }
            }
            if net.layers.iter().any(|l| l.weights.iter().any(|w| !w.is_finite())) {
                return Err(Error::TrainingDiverged { epoch: epoch + 1, batch: batch_no + 1, loss: f64::NAN });
            }
        }
    }
    let meta = EstimatorMeta { family: "mlp".into(), params: config.describe(), n_train: train.len() };
    Ok(PosteriorEstimate::new(net, meta))
}
