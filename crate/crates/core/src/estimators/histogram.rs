use std::collections::HashMap;

use super::{EstimatorMeta, PosteriorEstimate, PosteriorModel};
use crate::distributions::Dataset;
use crate::error::{Error, Result};
use crate::simplex;

/// What a cell without training points predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmptyCellPolicy {
    #[default]
    Uniform,
    /// Class frequencies of the whole training set.
    GlobalFrequency,
}

/// `n^(-1/(d+2))`.
pub fn default_bin_width(n: usize, d: usize) -> f64 {
    (n.max(1) as f64).powf(-1.0 / (d as f64 + 2.0))
}

struct Histogram {
    width: f64,
    d: usize,
    cells: HashMap<Vec<i64>, Vec<f64>>,
    fallback: Vec<f64>,
}

fn cell_of(x: &[f64], width: f64) -> Vec<i64> {
    x.iter().map(|v| (v / width).floor() as i64).collect()
}

impl PosteriorModel for Histogram {
    fn num_classes(&self) -> usize {
        self.fallback.len()
    }

    fn posterior(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: x.len() });
        }
        Ok(self.cells.get(&cell_of(x, self.width)).unwrap_or(&self.fallback).clone())
    }
}

/// Class frequencies within the cube of side `bin_width` (grid anchored at
/// the origin) that contains the query.
pub fn fit_histogram(train: &Dataset, bin_width: f64, empty_cell: EmptyCellPolicy) -> Result<PosteriorEstimate> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::Domain(format!("bin width must be positive, got {bin_width}")));
    }
    let mut counts: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (x, &y) in train.features.iter().zip(&train.labels) {
        counts.entry(cell_of(x, bin_width)).or_insert_with(|| vec![0; train.k])[y] += 1;
    }
    let cells = counts
        .into_iter()
        .map(|(cell, c)| {
            let total: usize = c.iter().sum();
            (cell, c.into_iter().map(|v| v as f64 / total as f64).collect())
        })
        .collect();
    let fallback = match empty_cell {
        EmptyCellPolicy::Uniform => simplex::uniform(train.k),
        EmptyCellPolicy::GlobalFrequency if !train.is_empty() => train.class_frequencies(),
        EmptyCellPolicy::GlobalFrequency => simplex::uniform(train.k),
    };
    let model = Histogram { width: bin_width, d: train.d, cells, fallback };
    let meta = EstimatorMeta { family: "histogram".into(), params: format!("h={bin_width}"), n_train: train.len() };
    Ok(PosteriorEstimate::new(model, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Provenance;

    fn ds(features: Vec<Vec<f64>>, labels: Vec<usize>, k: usize) -> Dataset {
        Dataset::new(features, labels, k, Provenance::Clean).unwrap()
    }

    #[test]
    fn spec_examples() {
        let one = ds(vec![vec![0.5, 0.5]], vec![1], 2);
        let est = fit_histogram(&one, 1.0, EmptyCellPolicy::Uniform).unwrap();
        assert_eq!(est.predict(&[0.1, 0.9]).unwrap(), vec![0.0, 1.0]);

        let four = ds(vec![vec![0.5]], vec![0], 4);
        let est = fit_histogram(&four, 1.0, EmptyCellPolicy::Uniform).unwrap();
        assert_eq!(est.predict(&[3.5]).unwrap(), vec![0.25; 4]);

        let two = ds(vec![vec![0.2], vec![0.7]], vec![0, 1], 2);
        let est = fit_histogram(&two, 1.0, EmptyCellPolicy::Uniform).unwrap();
        assert_eq!(est.predict(&[0.4]).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn negative_coordinates_use_floor() {
        let two = ds(vec![vec![-0.2], vec![0.2]], vec![0, 1], 2);
        let est = fit_histogram(&two, 1.0, EmptyCellPolicy::Uniform).unwrap();
        assert_eq!(est.predict(&[-0.9]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(est.predict(&[0.9]).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn global_frequency_fallback() {
        let three = ds(vec![vec![0.1], vec![0.2], vec![0.3]], vec![0, 0, 1], 2);
        let est = fit_histogram(&three, 1.0, EmptyCellPolicy::GlobalFrequency).unwrap();
        let p = est.predict(&[7.0]).unwrap();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_width() {
        let one = ds(vec![vec![0.5]], vec![1], 2);
        for h in [0.0, -1.0, f64::NAN] {
            assert!(fit_histogram(&one, h, EmptyCellPolicy::Uniform).is_err());
        }
    }

    #[test]
    fn default_width() {
        assert!((default_bin_width(10_000, 2) - 0.1).abs() < 1e-12);
    }
}
