//! Plain-text formats.
//!
//! Discrete distribution:
//!
//! ```text
//! M K d
//! x_1 ... x_d | weight | p_1 ... p_K
//! ```
//!
//! Labelled dataset (no posteriors, labels 1-based):
//!
//! ```text
//! N K d
//! x_1 ... x_d | label
//! ```
//!
//! Blank lines and `#` comments are ignored. Errors carry 1-based line numbers.

use super::{Dataset, DiscreteJointDistribution, Provenance};
use crate::error::{Error, Result};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn numbers(line: usize, field: &str, what: &str) -> Result<Vec<f64>> {
    field
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(line, format!("{what}: `{t}` is not a finite number")))
        })
        .collect()
}

fn header(lines: &mut dyn Iterator<Item = (usize, &str)>) -> Result<(usize, [usize; 3])> {
    let (lno, h) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
    let parts: Vec<usize> = h
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse(lno, format!("header must be three integers, found `{h}`")))?;
    match parts.as_slice() {
        &[a, b, c] => Ok((lno, [a, b, c])),
        _ => Err(Error::parse(lno, format!("header must be three integers, found `{h}`"))),
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

impl DiscreteJointDistribution {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hline, [m, k, d]) = header(&mut lines)?;
        let mut points = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        let mut posteriors = Vec::with_capacity(m);
        let mut last = hline;
        for _ in 0..m {
            let (lno, line) =
                lines.next().ok_or_else(|| Error::parse(last + 1, format!("expected {m} support points")))?;
            last = lno;
            let fields: Vec<&str> = line.split('|').collect();
            if fields.len() != 3 {
                return Err(Error::parse(lno, "expected `features | weight | posterior`"));
            }
            let x = numbers(lno, fields[0], "feature")?;
            let w = numbers(lno, fields[1], "weight")?;
            let p = numbers(lno, fields[2], "posterior")?;
            if x.len() != d {
                return Err(Error::parse(lno, format!("expected {d} features, found {}", x.len())));
            }
            if w.len() != 1 {
                return Err(Error::parse(lno, "expected a single weight"));
            }
            if p.len() != k {
                return Err(Error::parse(lno, format!("expected {k} posterior entries, found {}", p.len())));
            }
            points.push(x);
            weights.push(w[0]);
            posteriors.push(p);
        }
        if let Some((lno, _)) = lines.next() {
            return Err(Error::parse(lno, "unexpected trailing content"));
        }
        Self::new(points, weights, posteriors).map_err(|e| Error::parse(hline, e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.support_size(), self.posteriors()[0].len(), self.points()[0].len());
        for ((x, w), p) in self.points().iter().zip(self.weights()).zip(self.posteriors()) {
            out.push_str(&format!("{} | {} | {}\n", join(x), w, join(p)));
        }
        out
    }
}

impl Dataset {
    /// Reads the dataset format. `source` ends up in the provenance tag.
    pub fn from_text(text: &str, source: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hline, [n, k, d]) = header(&mut lines)?;
        if k < 2 {
            return Err(Error::parse(hline, format!("class count must be at least 2, got {k}")));
        }
        let mut features = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        let mut last = hline;
        for _ in 0..n {
            let (lno, line) = lines.next().ok_or_else(|| Error::parse(last + 1, format!("expected {n} rows")))?;
            last = lno;
            let (xs, label) = line.split_once('|').ok_or_else(|| Error::parse(lno, "expected `features | label`"))?;
            let x = numbers(lno, xs, "feature")?;
            if x.len() != d {
                return Err(Error::parse(lno, format!("expected {d} features, found {}", x.len())));
            }
            let label: usize = label
                .trim()
                .parse()
                .map_err(|_| Error::parse(lno, format!("label `{}` is not an integer", label.trim())))?;
            if label == 0 || label > k {
                return Err(Error::parse(lno, format!("label {label} outside 1..={k}")));
            }
            features.push(x);
            labels.push(label - 1);
        }
        if let Some((lno, _)) = lines.next() {
            return Err(Error::parse(lno, "unexpected trailing content"));
        }
        Dataset::new(features, labels, k, Provenance::Ingested { source: source.to_string() })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.len(), self.k, self.d);
        for (x, y) in self.features.iter().zip(&self.labels) {
            out.push_str(&format!("{} | {}\n", join(x), y + 1));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::random_discrete;

    #[test]
    fn distribution_round_trip() {
        let d = random_discrete(3, 7, 1).unwrap();
        let back = DiscreteJointDistribution::from_text(&d.to_text()).unwrap();
        assert_eq!(back.points(), d.points());
        assert_eq!(back.weights(), d.weights());
        assert_eq!(back.posteriors(), d.posteriors());
    }

    #[test]
    fn distribution_parse() {
        let text = "# two points\n2 2 1\n0 | 0.5 | 0.9 0.1\n1 | 0.5 | 0.3 0.7\n";
        let d = DiscreteJointDistribution::from_text(text).unwrap();
        assert_eq!(d.posteriors()[1], vec![0.3, 0.7]);

        let e = DiscreteJointDistribution::from_text("2 2 1\n0 | 0.5 | 0.9 0.1\n1 | 0.5 | 0.3\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = DiscreteJointDistribution::from_text("2 2 1\n0 | 0.5 | 0.9 0.1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = DiscreteJointDistribution::from_text("2 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = DiscreteJointDistribution::from_text("1 2 1\nx | 1 | 0.5 0.5\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn dataset_round_trip_and_errors() {
        let ds = Dataset::new(
            vec![vec![0.5, -1.0], vec![2.0, 3.25]],
            vec![1, 0],
            2,
            Provenance::Ingested { source: "t".into() },
        )
        .unwrap();
        let text = ds.to_text();
        assert_eq!(text, "2 2 2\n0.5 -1 | 2\n2 3.25 | 1\n");
        assert_eq!(Dataset::from_text(&text, "t").unwrap(), ds);
        let e = Dataset::from_text("1 2 1\n0.5 | 3\n", "t").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }
}
