use super::kdtree::KdTree;
use super::{EstimatorMeta, PosteriorEstimate, PosteriorModel};
use crate::distributions::Dataset;
use crate::error::{Error, Result};

/// `ceil(sqrt(n))`, computed without floating-point surprises.
pub fn default_neighbors(n: usize) -> usize {
    let mut r = (n as f64).sqrt().ceil() as usize;
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    while r * r < n {
        r += 1;
    }
    r.max(1)
}

struct Knn {
    tree: KdTree,
    labels: Vec<usize>,
    k: usize,
    neighbors: usize,
    d: usize,
}

impl PosteriorModel for Knn {
    fn num_classes(&self) -> usize {
        self.k
    }

    fn posterior(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: x.len() });
        }
        let mut counts = vec![0usize; self.k];
        for n in self.tree.nearest(x, self.neighbors) {
            counts[self.labels[n.index]] += 1;
        }
        Ok(counts.into_iter().map(|c| c as f64 / self.neighbors as f64).collect())
    }
}

/// Class frequencies among the `k_neighbors` nearest training points
/// (Euclidean; equal distances resolved by training order).
pub fn fit_knn(train: &Dataset, k_neighbors: usize) -> Result<PosteriorEstimate> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if k_neighbors == 0 || k_neighbors > train.len() {
        return Err(Error::Domain(format!("neighbour count must be in 1..={}, got {k_neighbors}", train.len())));
    }
    let model = Knn {
        tree: KdTree::build(&train.features, train.d),
        labels: train.labels.clone(),
        k: train.k,
        neighbors: k_neighbors,
        d: train.d,
    };
    let meta = EstimatorMeta { family: "knn".into(), params: format!("k={k_neighbors}"), n_train: train.len() };
    Ok(PosteriorEstimate::new(model, meta))
}
