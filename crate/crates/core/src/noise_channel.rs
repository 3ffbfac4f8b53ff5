//! Class-conditional label-noise channels.
//!
//! A channel is a K×K row-stochastic matrix `A` with
//! `A[i][j] = P(observed = j | true = i)`. Classes are 0-based here; the
//! text format and the CLI talk 1-based.

use std::fmt;

use rand::Rng as _;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seeding::Rng;
use crate::simplex;

/// Row-sum tolerance accepted by [`TransitionMatrix::general`].
pub const GENERAL_ROW_TOL: f64 = 1e-9;

/// Channels with `|det| <= SINGULAR_DET` are treated as singular.
pub const SINGULAR_DET: f64 = 1e-12;

/// How a channel was constructed. Only used for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelKind {
    Symmetric {
        alpha: f64,
    },
    Shift {
        alpha: f64,
    },
    /// Binary class-dependent flips: class 1 flips with `alpha`, class 2 with `beta`.
    Binary {
        alpha: f64,
        beta: f64,
    },
    General,
}

impl ChannelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelKind::Symmetric { .. } => "symmetric",
            ChannelKind::Shift { .. } => "shift",
            ChannelKind::Binary { .. } => "binary",
            ChannelKind::General => "general",
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            ChannelKind::Symmetric { alpha } | ChannelKind::Shift { alpha } | ChannelKind::Binary { alpha, .. } => {
                Some(alpha)
            }
            ChannelKind::General => None,
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match *self {
            ChannelKind::Binary { beta, .. } => Some(beta),
            _ => None,
        }
    }
}

/// Result of [`TransitionMatrix::is_invertible`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invertibility {
    pub invertible: bool,
    pub det: f64,
}

/// Validated, immutable K×K label-noise channel.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    k: usize,
    /// Row-major.
    entries: Vec<f64>,
    kind: ChannelKind,
}

impl PartialEq for TransitionMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.entries == other.entries
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        Err(Error::InvalidClassCount(k))
    } else {
        Ok(())
    }
}

fn check_prob(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}

/// Largest symmetric noise level at which the noisy argmax still equals the
/// clean argmax: `(K - 1) / K`.
pub fn breakdown_threshold(k: usize) -> Result<f64> {
    check_k(k)?;
    Ok((k - 1) as f64 / k as f64)
}

impl TransitionMatrix {
    /// `1 - alpha` on the diagonal and `alpha / (K - 1)` everywhere else.
    ///
    /// At the breakdown level the two values coincide mathematically; there
    /// every entry is set to exactly `1/K` so the channel erases all
    /// information bit-for-bit instead of up to rounding.
    pub fn symmetric(k: usize, alpha: f64) -> Result<Self> {
        check_k(k)?;
        check_prob("alpha", alpha)?;
        let mut diag = 1.0 - alpha;
        let mut off = alpha / (k - 1) as f64;
        if (diag - off).abs() <= 4.0 * f64::EPSILON {
            diag = 1.0 / k as f64;
            off = diag;
        }
        let mut entries = vec![off; k * k];
        for i in 0..k {
            entries[i * k + i] = diag;
        }
        Ok(TransitionMatrix { k, entries, kind: ChannelKind::Symmetric { alpha } })
    }

    /// Each class `i` is kept with probability `1 - alpha` and moved to
    /// `(i + 1) mod K` with probability `alpha`.
    pub fn shift(k: usize, alpha: f64) -> Result<Self> {
        check_k(k)?;
        check_prob("alpha", alpha)?;
        let mut entries = vec![0.0; k * k];
        for i in 0..k {
            entries[i * k + i] = 1.0 - alpha;
            entries[i * k + (i + 1) % k] += alpha;
        }
        Ok(TransitionMatrix { k, entries, kind: ChannelKind::Shift { alpha } })
    }

    /// Binary channel `[[1 - alpha, alpha], [beta, 1 - beta]]`.
    pub fn binary(alpha: f64, beta: f64) -> Result<Self> {
        check_prob("alpha", alpha)?;
        check_prob("beta", beta)?;
        Ok(TransitionMatrix {
            k: 2,
            entries: vec![1.0 - alpha, alpha, beta, 1.0 - beta],
            kind: ChannelKind::Binary { alpha, beta },
        })
    }

    /// Validates an arbitrary matrix. Row indices in errors are 1-based.
    pub fn general(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        check_k(k)?;
        let mut entries = Vec::with_capacity(k * k);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::NotSquare { row: i + 1, len: row.len(), expected: k });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidEntry { row: i + 1, col: j + 1, value: v });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > GENERAL_ROW_TOL {
                return Err(Error::NotRowStochastic { row: i + 1, sum });
            }
            // Rows already stochastic up to summation rounding are kept as
            // given, so that writing and re-reading a matrix is lossless.
            if (sum - 1.0).abs() <= k as f64 * f64::EPSILON {
                entries.extend_from_slice(row);
            } else {
                entries.extend(row.iter().map(|v| v / sum));
            }
        }
        Ok(TransitionMatrix { k, entries, kind: ChannelKind::General })
    }

    pub fn identity(k: usize) -> Result<Self> {
        Self::symmetric(k, 0.0)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn entry(&self, from: usize, to: usize) -> f64 {
        self.entries[from * self.k + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.entries[from * self.k..(from + 1) * self.k]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.k).map(|i| self.row(i).to_vec()).collect()
    }

    /// Noisy-label posterior `q = p A` for a clean posterior `p`.
    pub fn apply_to_posterior(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, got: p.len() });
        }
        simplex::check(p, simplex::INPUT_TOL)?;
        Ok(self.mul_left(p))
    }

    /// Row vector times matrix, no validation.
    pub(crate) fn mul_left(&self, p: &[f64]) -> Vec<f64> {
        let k = self.k;
        let mut q = vec![0.0; k];
        for (i, &pi) in p.iter().enumerate() {
            let row = &self.entries[i * k..(i + 1) * k];
            for (qj, &a) in q.iter_mut().zip(row) {
                *qj += pi * a;
            }
        }
        q
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn determinant(&self) -> f64 {
        let n = self.k;
        let mut m = self.entries.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n).max_by(|&a, &b| m[a * n + col].abs().total_cmp(&m[b * n + col].abs())).unwrap();
            if m[pivot * n + col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for c in 0..n {
                    m.swap(pivot * n + c, col * n + c);
                }
                det = -det;
            }
            let d = m[col * n + col];
            det *= d;
            for r in col + 1..n {
                let f = m[r * n + col] / d;
                if f != 0.0 {
                    for c in col..n {
                        m[r * n + c] -= f * m[col * n + c];
                    }
                }
            }
        }
        det
    }

    pub fn is_invertible(&self) -> Invertibility {
        let det = self.determinant();
        Invertibility { invertible: det.abs() > SINGULAR_DET, det }
    }

    /// `A^{-1}` by Gauss-Jordan elimination with partial pivoting.
    ///
    /// The inverse of a channel is generally not a channel, so it is returned
    /// as plain rows.
    pub fn inverse(&self) -> Result<Vec<Vec<f64>>> {
        let inv = self.is_invertible();
        if !inv.invertible {
            return Err(Error::SingularChannel { det: inv.det });
        }
        let n = self.k;
        let w = 2 * n;
        let mut m = vec![0.0; n * w];
        for i in 0..n {
            m[i * w..i * w + n].copy_from_slice(self.row(i));
            m[i * w + n + i] = 1.0;
        }
        for col in 0..n {
            let pivot = (col..n).max_by(|&a, &b| m[a * w + col].abs().total_cmp(&m[b * w + col].abs())).unwrap();
            if pivot != col {
                for c in 0..w {
                    m.swap(pivot * w + c, col * w + c);
                }
            }
            let d = m[col * w + col];
            for c in 0..w {
                m[col * w + c] /= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = m[r * w + col];
                if f != 0.0 {
                    for c in 0..w {
                        m[r * w + c] -= f * m[col * w + c];
                    }
                }
            }
        }
        Ok((0..n).map(|i| m[i * w + n..(i + 1) * w].to_vec()).collect())
    }

    /// Parses the plain-text format: a line with K, then K lines of K numbers.
    /// Blank lines and `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing class count"))?;
        let k: usize =
            header.parse().map_err(|_| Error::parse(hline, format!("expected class count, found `{header}`")))?;
        if k < 2 {
            return Err(Error::parse(hline, format!("class count must be at least 2, got {k}")));
        }
        let mut rows = Vec::with_capacity(k);
        let mut last = hline;
        for _ in 0..k {
            let (lno, line) =
                lines.next().ok_or_else(|| Error::parse(last + 1, format!("expected {k} matrix rows")))?;
            last = lno;
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(lno, format!("bad number: {e}")))?;
            if row.len() != k {
                return Err(Error::parse(lno, format!("expected {k} entries, found {}", row.len())));
            }
            rows.push((lno, row));
        }
        if let Some((lno, _)) = lines.next() {
            return Err(Error::parse(lno, "unexpected trailing content"));
        }
        let plain: Vec<Vec<f64>> = rows.iter().map(|(_, r)| r.clone()).collect();
        Self::general(&plain).map_err(|e| {
            let lno = match e {
                Error::NotRowStochastic { row, .. } | Error::InvalidEntry { row, .. } => rows[row - 1].0,
                _ => hline,
            };
            Error::parse(lno, e.to_string())
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.k);
        for i in 0..self.k {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ChannelKind::Symmetric { alpha } => write!(f, "symmetric(K={}, alpha={alpha})", self.k),
            ChannelKind::Shift { alpha } => write!(f, "shift(K={}, alpha={alpha})", self.k),
            ChannelKind::Binary { alpha, beta } => write!(f, "binary(alpha={alpha}, beta={beta})"),
            ChannelKind::General => write!(f, "general(K={})", self.k),
        }
    }
}

/// Recovers the clean posterior from a noisy one under symmetric noise:
/// `p_j = (q_j - alpha/(K-1)) / (1 - alpha - alpha/(K-1))`.
pub fn invert_symmetric(q: &[f64], alpha: f64, k: usize) -> Result<Vec<f64>> {
    let threshold = breakdown_threshold(k)?;
    check_prob("alpha", alpha)?;
    if alpha >= threshold {
        return Err(Error::AboveThreshold { alpha, k, threshold });
    }
    if q.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: q.len() });
    }
    simplex::check(q, simplex::INPUT_TOL)?;
    Ok(invert_symmetric_unchecked(q, alpha, k))
}

pub(crate) fn invert_symmetric_unchecked(q: &[f64], alpha: f64, k: usize) -> Vec<f64> {
    let off = alpha / (k - 1) as f64;
    let scale = 1.0 - alpha - off;
    q.iter().map(|&v| (v - off) / scale).collect()
}

/// Draws a categorical index from `row` by inverse CDF over columns in
/// increasing order. Zero-probability columns are never returned.
fn sample_row(row: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (j, &p) in row.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_positive = j;
            if u < acc {
                return j;
            }
        }
    }
    last_positive
}

/// Passes each (0-based) label through the channel independently.
pub fn corrupt_labels(labels: &[usize], channel: &TransitionMatrix, rng: &mut Rng) -> Result<Vec<usize>> {
    let k = channel.k();
    if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
        return Err(Error::LabelOutOfRange { index, label: label + 1, k });
    }
    Ok(labels.iter().map(|&y| sample_row(channel.row(y), rng.random::<f64>())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::rng_from_seed;

    fn assert_rows(m: &TransitionMatrix, expected: &[&[f64]]) {
        for (i, row) in expected.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert!((m.entry(i, j) - v).abs() < 1e-15, "({i},{j}): {} vs {v}", m.entry(i, j));
            }
        }
    }

    #[test]
    fn symmetric_examples() {
        assert_rows(&TransitionMatrix::symmetric(2, 0.3).unwrap(), &[&[0.7, 0.3], &[0.3, 0.7]]);
        assert_rows(&TransitionMatrix::symmetric(2, 0.0).unwrap(), &[&[1.0, 0.0], &[0.0, 1.0]]);
        let m = TransitionMatrix::symmetric(3, 0.6).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 0.4 } else { 0.3 };
                assert!((m.entry(i, j) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert_eq!(TransitionMatrix::symmetric(1, 0.1), Err(Error::InvalidClassCount(1)));
        assert!(matches!(TransitionMatrix::symmetric(3, 1.2), Err(Error::InvalidProbability { .. })));
        assert!(matches!(TransitionMatrix::shift(3, -0.1), Err(Error::InvalidProbability { .. })));
        assert!(matches!(TransitionMatrix::symmetric(3, f64::NAN), Err(Error::InvalidProbability { .. })));
        assert_eq!(TransitionMatrix::shift(0, 0.1), Err(Error::InvalidClassCount(0)));
    }

    #[test]
    fn shift_examples() {
        let m = TransitionMatrix::shift(10, 0.2).unwrap();
        assert!((m.entry(9, 9) - 0.8).abs() < 1e-15);
        assert!((m.entry(9, 0) - 0.2).abs() < 1e-15);
        assert_eq!(m.row(9).iter().filter(|&&v| v > 0.0).count(), 2);
        let m = TransitionMatrix::shift(2, 0.45).unwrap();
        assert_rows(&m, &[&[0.55, 0.45], &[0.45, 0.55]]);
        assert_eq!(m, TransitionMatrix::symmetric(2, 0.45).unwrap());
        assert_eq!(TransitionMatrix::shift(5, 0.0).unwrap(), TransitionMatrix::identity(5).unwrap());
    }

    #[test]
    fn general_examples() {
        let id = TransitionMatrix::general(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(id, TransitionMatrix::identity(2).unwrap());
        match TransitionMatrix::general(&[vec![0.5, 0.5], vec![0.6, 0.3]]) {
            Err(Error::NotRowStochastic { row, sum }) => {
                assert_eq!(row, 2);
                assert!((sum - 0.9).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let m = TransitionMatrix::general(&[vec![0.7, 0.3], vec![0.3, 0.7]]).unwrap();
        assert_eq!(m, TransitionMatrix::symmetric(2, 0.3).unwrap());
        assert!(matches!(
            TransitionMatrix::general(&[vec![1.0, 0.0], vec![1.0]]),
            Err(Error::NotSquare { row: 2, .. })
        ));
        assert!(matches!(
            TransitionMatrix::general(&[vec![1.2, -0.2], vec![0.0, 1.0]]),
            Err(Error::InvalidEntry { row: 1, .. })
        ));
    }

    #[test]
    fn thresholds() {
        assert_eq!(breakdown_threshold(2).unwrap(), 0.5);
        assert!((breakdown_threshold(10).unwrap() - 0.9).abs() < 1e-15);
        assert!((breakdown_threshold(3).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(breakdown_threshold(1), Err(Error::InvalidClassCount(1)));
    }

    #[test]
    fn apply_examples() {
        let a = TransitionMatrix::symmetric(2, 0.25).unwrap();
        let q = a.apply_to_posterior(&[0.8, 0.2]).unwrap();
        assert!((q[0] - 0.65).abs() < 1e-15 && (q[1] - 0.35).abs() < 1e-15);

        let a = TransitionMatrix::symmetric(5, 0.37).unwrap();
        let q = a.apply_to_posterior(&[0.2; 5]).unwrap();
        assert!(q.iter().all(|v| (v - 0.2).abs() < 1e-15));

        let a = TransitionMatrix::shift(3, 0.2).unwrap();
        let q = a.apply_to_posterior(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(q, vec![0.8, 0.2, 0.0]);

        assert!(matches!(a.apply_to_posterior(&[0.5, 0.5]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(a.apply_to_posterior(&[0.5, 0.5, 0.5]), Err(Error::OffSimplex { .. })));
    }

    #[test]
    fn invert_examples() {
        let p = invert_symmetric(&[0.65, 0.35], 0.25, 2).unwrap();
        assert!((p[0] - 0.8).abs() < 1e-12 && (p[1] - 0.2).abs() < 1e-12);
        let q = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(invert_symmetric(&q, 0.0, 4).unwrap(), q.to_vec());
        let p = invert_symmetric(&[0.25; 4], 0.6, 4).unwrap();
        assert!(p.iter().all(|v| (v - 0.25).abs() < 1e-12));
        assert!(matches!(invert_symmetric(&[0.5, 0.5], 0.5, 2), Err(Error::AboveThreshold { .. })));
        assert!(matches!(invert_symmetric(&[0.25; 4], 0.8, 4), Err(Error::AboveThreshold { .. })));
    }

    // Eigenvalues of the symmetric channel: 1 (once) and 1 - alpha*K/(K-1) (K-1 times).
    fn symmetric_det_oracle(k: usize, alpha: f64) -> f64 {
        (1.0 - alpha * k as f64 / (k - 1) as f64).powi(k as i32 - 1)
    }

    #[test]
    fn invertibility_examples() {
        let m = TransitionMatrix::symmetric(4, 0.75).unwrap();
        assert_eq!(symmetric_det_oracle(4, 0.75), 0.0);
        assert!(!m.is_invertible().invertible);

        let m = TransitionMatrix::symmetric(2, 0.49).unwrap();
        assert!((symmetric_det_oracle(2, 0.49) - 0.02).abs() < 1e-15);
        let inv = m.is_invertible();
        assert!(inv.invertible);
        assert!((inv.det - 0.02).abs() < 1e-12);

        // Circulant eigenvalues 0.5 + 0.5 w^j; j = 5 gives w^5 = -1 for K = 10.
        let m = TransitionMatrix::shift(10, 0.5).unwrap();
        let inv = m.is_invertible();
        assert!(!inv.invertible, "det = {}", inv.det);
    }

    #[test]
    fn inverse_round_trip() {
        let m = TransitionMatrix::shift(4, 0.3).unwrap();
        let inv = m.inverse().unwrap();
        for i in 0..4 {
            for (j, _) in inv.iter().enumerate() {
                let v: f64 = (0..4).map(|l| m.entry(i, l) * inv[l][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-12);
            }
        }
        assert!(matches!(
            TransitionMatrix::symmetric(3, 2.0 / 3.0).unwrap().inverse(),
            Err(Error::SingularChannel { .. })
        ));
    }

    #[test]
    fn threshold_channel_is_exactly_uniform() {
        for k in 2..=10 {
            let t = breakdown_threshold(k).unwrap();
            let m = TransitionMatrix::symmetric(k, t).unwrap();
            assert!(m.rows().iter().flatten().all(|&v| v == 1.0 / k as f64));
        }
    }

    #[test]
    fn corrupt_identity_and_full_flip() {
        let mut rng = rng_from_seed(1);
        let labels: Vec<usize> = (0..200).map(|i| i % 4).collect();
        let id = TransitionMatrix::identity(4).unwrap();
        assert_eq!(corrupt_labels(&labels, &id, &mut rng).unwrap(), labels);

        let flip = TransitionMatrix::symmetric(2, 1.0).unwrap();
        let labels: Vec<usize> = (0..200).map(|i| i % 2).collect();
        let out = corrupt_labels(&labels, &flip, &mut rng).unwrap();
        assert!(out.iter().zip(&labels).all(|(a, b)| a != b));
    }

    #[test]
    fn corrupt_rejects_out_of_range() {
        let mut rng = rng_from_seed(1);
        let m = TransitionMatrix::identity(3).unwrap();
        assert_eq!(corrupt_labels(&[0, 3], &m, &mut rng), Err(Error::LabelOutOfRange { index: 1, label: 4, k: 3 }));
    }

    #[test]
    fn corrupt_retention_rate() {
        // Binomial oracle: 0.7 +- 4 * sqrt(0.3 * 0.7 / 1e5) = [0.694, 0.706].
        let n = 100_000;
        let sigma = (0.3f64 * 0.7 / n as f64).sqrt();
        assert!((4.0 * sigma - 0.0058).abs() < 1e-4);
        let m = TransitionMatrix::symmetric(3, 0.3).unwrap();
        let out = corrupt_labels(&vec![0; n], &m, &mut rng_from_seed(42)).unwrap();
        let kept = out.iter().filter(|&&z| z == 0).count() as f64 / n as f64;
        assert!((0.694..=0.706).contains(&kept), "{kept}");
    }

    #[test]
    fn corrupt_is_deterministic() {
        let m = TransitionMatrix::shift(5, 0.4).unwrap();
        let labels: Vec<usize> = (0..1000).map(|i| i % 5).collect();
        let a = corrupt_labels(&labels, &m, &mut rng_from_seed(9)).unwrap();
        let b = corrupt_labels(&labels, &m, &mut rng_from_seed(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn text_format() {
        let m = TransitionMatrix::from_text("2\n0.7 0.3\n0.3 0.7\n").unwrap();
        assert_eq!(m, TransitionMatrix::symmetric(2, 0.3).unwrap());
        let back = TransitionMatrix::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);

        assert_eq!(
            TransitionMatrix::from_text("2\n0.5 0.5\n0.6 0.3\n"),
            Err(Error::parse(3, "row 2 sums to 0.8999999999999999, expected 1"))
        );
        assert!(matches!(TransitionMatrix::from_text("x\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(TransitionMatrix::from_text("2\n1 0 0\n0 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(TransitionMatrix::from_text("2\n1 0\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(TransitionMatrix::from_text("2\n1 0\n0 1\n9\n"), Err(Error::Parse { line: 4, .. })));
    }
}
