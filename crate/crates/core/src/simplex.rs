//! Small helpers for probability vectors.

use crate::error::{Error, Result};

/// Tolerance for simplex membership of vectors coming from outside (files, callers).
pub const INPUT_TOL: f64 = 1e-9;

/// Tolerance for vectors and rows this crate constructs itself.
pub const OUTPUT_TOL: f64 = 1e-12;

/// Checks that `p` has non-negative entries summing to 1 within `tol`.
pub fn check(p: &[f64], tol: f64) -> Result<()> {
    if p.is_empty() {
        return Err(Error::OffSimplex { reason: "empty vector".into() });
    }
    let mut sum = 0.0;
    for (i, &v) in p.iter().enumerate() {
        if !v.is_finite() || v < -tol {
            return Err(Error::OffSimplex { reason: format!("entry {} is {v}", i + 1) });
        }
        sum += v;
    }
    if (sum - 1.0).abs() > tol {
        return Err(Error::OffSimplex { reason: format!("entries sum to {sum}") });
    }
    Ok(())
}

pub fn is_on(p: &[f64], tol: f64) -> bool {
    check(p, tol).is_ok()
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate().skip(1) {
        if v > p[best] {
            best = i;
        }
    }
    best
}

/// True when the maximum of `p` is attained more than once.
pub fn has_tied_max(p: &[f64]) -> bool {
    let top = p[argmax(p)];
    p.iter().filter(|&&v| v == top).count() > 1
}

pub fn uniform(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}

/// Sets negative entries to zero and rescales to unit sum.
///
/// Falls back to the uniform vector if nothing positive remains.
pub fn clip_renormalize(mut p: Vec<f64>) -> Vec<f64> {
    for v in p.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let sum: f64 = p.iter().sum();
    if sum > 0.0 && sum.is_finite() {
        for v in p.iter_mut() {
            *v /= sum;
        }
        p
    } else {
        uniform(p.len())
    }
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
