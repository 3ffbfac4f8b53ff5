use std::fmt;

use crate::error::{Error, Result};
use crate::noise_channel::{corrupt_labels, TransitionMatrix};
use crate::seeding::Rng;

/// Where a dataset's labels came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Clean,
    Noisy {
        channel: String,
        seed: u64,
    },
    /// Read from an external file; no ground-truth posterior exists.
    Ingested {
        source: String,
    },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Clean => write!(f, "clean"),
            Provenance::Noisy { channel, seed } => write!(f, "noisy({channel}, seed={seed})"),
            Provenance::Ingested { source } => write!(f, "ingested({source})"),
        }
    }
}

/// Labelled sample. Labels are 0-based class indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub k: usize,
    pub d: usize,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<usize>, k: usize, provenance: Provenance) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidClassCount(k));
        }
        if features.len() != labels.len() {
            return Err(Error::DimensionMismatch { expected: features.len(), got: labels.len() });
        }
        let d = features.first().map_or(0, Vec::len);
        if let Some(bad) = features.iter().find(|x| x.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
        }
        if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return Err(Error::LabelOutOfRange { index, label: label + 1, k });
        }
        Ok(Dataset { features, labels, k, d, provenance })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Same features, labels passed through `channel`.
    pub fn corrupted(&self, channel: &TransitionMatrix, rng: &mut Rng, seed: u64) -> Result<Dataset> {
        if channel.k() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, got: channel.k() });
        }
        let labels = corrupt_labels(&self.labels, channel, rng)?;
        Ok(Dataset {
            features: self.features.clone(),
            labels,
            k: self.k,
            d: self.d,
            provenance: Provenance::Noisy { channel: channel.to_string(), seed },
        })
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            k: self.k,
            d: self.d,
            provenance: self.provenance.clone(),
        }
    }

    /// Relative frequency of each class.
    pub fn class_frequencies(&self) -> Vec<f64> {
        let mut counts = vec![0.0; self.k];
        for &y in &self.labels {
            counts[y] += 1.0;
        }
        let n = self.len().max(1) as f64;
        counts.iter().map(|c| c / n).collect()
    }
}
