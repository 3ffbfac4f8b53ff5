//! Results CSV.
//!
//! One row per cell, columns in [`COLUMNS`] order. Unavailable numbers are
//! written as `NA`. A cell that failed is written with `FAILED` in the `risk`
//! column and `NA` in every other numeric column.

use std::io::Write;

use crate::error::{Error, Result};
use crate::evaluation::{CellError, RiskReport, TrendPoint};
use crate::mitigation::Mitigation;

pub const COLUMNS: [&str; 16] = [
    "experiment_id",
    "seed",
    "K",
    "d",
    "noise_kind",
    "alpha",
    "beta",
    "n_train",
    "estimator",
    "mitigation",
    "risk",
    "risk_se",
    "bayes_risk",
    "excess_risk",
    "l1_posterior_error",
    "l2_posterior_error",
];

pub const NA: &str = "NA";
pub const FAILED: &str = "FAILED";

fn num(v: f64) -> String {
    if v.is_nan() {
        NA.to_string()
    } else {
        v.to_string()
    }
}

/// Context shared by every row of a run, needed to describe failed cells.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub experiment_id: String,
    pub k: usize,
    pub d: usize,
    pub noise_kind: String,
    pub beta: Option<f64>,
    pub estimator: String,
    pub mitigation: Mitigation,
}

fn to_io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Writes the header and one row per cell. Failed cells get a marker row.
pub fn write_results<W: Write>(
    out: W,
    cells: &[std::result::Result<RiskReport, CellError>],
    ctx: &RunContext,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS).map_err(to_io)?;
    for cell in cells {
        let row: Vec<String> = match cell {
            Ok(r) => vec![
                r.experiment_id.clone(),
                r.seed.to_string(),
                r.k.to_string(),
                r.d.to_string(),
                r.noise_kind.clone(),
                num(r.alpha),
                r.beta.map_or(NA.to_string(), num),
                r.n_train.to_string(),
                r.estimator.clone(),
                r.mitigation.name().to_string(),
                num(r.risk),
                num(r.risk_se),
                num(r.bayes_risk),
                num(r.excess_risk),
                num(r.l1_posterior_error),
                num(r.l2_posterior_error),
            ],
            Err(e) => {
                let mut row = vec![
                    ctx.experiment_id.clone(),
                    e.seed.to_string(),
                    ctx.k.to_string(),
                    ctx.d.to_string(),
                    ctx.noise_kind.clone(),
                    num(e.alpha),
                    ctx.beta.map_or(NA.to_string(), num),
                    e.n_train.to_string(),
                    ctx.estimator.clone(),
                    ctx.mitigation.name().to_string(),
                    FAILED.to_string(),
                ];
                row.resize(COLUMNS.len(), NA.to_string());
                row
            }
        };
        w.write_record(&row).map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Renders results to a string.
pub fn results_to_string(cells: &[std::result::Result<RiskReport, CellError>], ctx: &RunContext) -> Result<String> {
    let mut buf = Vec::new();
    write_results(&mut buf, cells, ctx)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub const SUMMARY_COLUMNS: [&str; 5] =
    ["n_train", "seeds", "mean_l1_posterior_error", "mean_l2_posterior_error", "mean_risk"];

/// Seed-averaged consistency summary.
pub fn summary_to_string(points: &[TrendPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_COLUMNS).map_err(to_io)?;
    for p in points {
        w.write_record([p.n_train.to_string(), p.seeds.to_string(), num(p.mean_l1), num(p.mean_l2), num(p.mean_risk)])
            .map_err(to_io)?;
    }
    let buf = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// A parsed results row. `None` stands for `NA`; `failed` marks a failure row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment_id: String,
    pub seed: u64,
    pub k: usize,
    pub d: usize,
    pub noise_kind: String,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub n_train: usize,
    pub estimator: String,
    pub mitigation: String,
    pub failed: bool,
    pub risk: Option<f64>,
    pub risk_se: Option<f64>,
    pub bayes_risk: Option<f64>,
    pub excess_risk: Option<f64>,
    pub l1_posterior_error: Option<f64>,
    pub l2_posterior_error: Option<f64>,
}

/// Parses results CSV text. Errors name the offending line and column.
pub fn read_results(text: &str) -> Result<Vec<ResultRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::parse(1, e.to_string()))?.clone();
    if header.iter().all(|h| h.trim().is_empty()) {
        return Err(Error::parse(1, "empty results file"));
    }
    for (i, want) in COLUMNS.iter().enumerate() {
        match header.get(i) {
            Some(got) if got == *want => {}
            Some(got) => return Err(Error::parse(1, format!("column {}: expected `{want}`, found `{got}`", i + 1))),
            None => return Err(Error::parse(1, format!("missing column `{want}`"))),
        }
    }
    if header.len() > COLUMNS.len() {
        return Err(Error::parse(1, format!("unexpected extra column `{}`", &header[COLUMNS.len()])));
    }

    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| rec.get(i).unwrap_or("");
        let bad = |i: usize, what: &str| Error::parse(line, format!("column `{}`: {what} `{}`", COLUMNS[i], field(i)));
        let int = |i: usize| field(i).parse::<u64>().map_err(|_| bad(i, "expected an integer, found"));
        let real = |i: usize| field(i).parse::<f64>().map_err(|_| bad(i, "expected a number, found"));
        let opt = |i: usize| if field(i) == NA { Ok(None) } else { real(i).map(Some) };
        let failed = field(10) == FAILED;
        rows.push(ResultRow {
            experiment_id: field(0).to_string(),
            seed: int(1)?,
            k: int(2)? as usize,
            d: int(3)? as usize,
            noise_kind: field(4).to_string(),
            alpha: real(5)?,
            beta: opt(6)?,
            n_train: int(7)? as usize,
            estimator: field(8).to_string(),
            mitigation: field(9).to_string(),
            failed,
            risk: if failed { None } else { opt(10)? },
            risk_se: opt(11)?,
            bayes_risk: opt(12)?,
            excess_risk: opt(13)?,
            l1_posterior_error: opt(14)?,
            l2_posterior_error: opt(15)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(alpha: f64, risk: f64, bayes: f64) -> RiskReport {
        RiskReport {
            experiment_id: "e".into(),
            seed: 9,
            k: 3,
            d: 2,
            distribution: "x".into(),
            noise_kind: "symmetric".into(),
            alpha,
            beta: None,
            n_train: 100,
            estimator: "knn(k=10)".into(),
            mitigation: Mitigation::None,
            risk,
            risk_se: 0.01,
            bayes_risk: bayes,
            excess_risk: risk - bayes,
            l1_posterior_error: f64::NAN,
            l2_posterior_error: f64::NAN,
        }
    }

    fn ctx() -> RunContext {
        RunContext {
            experiment_id: "e".into(),
            k: 3,
            d: 2,
            noise_kind: "symmetric".into(),
            beta: None,
            estimator: "knn".into(),
            mitigation: Mitigation::None,
        }
    }

    #[test]
    fn header_is_exact() {
        let s = results_to_string(&[], &ctx()).unwrap();
        assert_eq!(
            s,
            "experiment_id,seed,K,d,noise_kind,alpha,beta,n_train,estimator,mitigation,risk,risk_se,\
             bayes_risk,excess_risk,l1_posterior_error,l2_posterior_error\n"
        );
    }

    #[test]
    fn round_trip_with_na_and_failure() {
        let cells = vec![
            Ok(report(0.1, 0.25, 0.2)),
            Ok(report(0.2, 0.5, f64::NAN)),
            Err(CellError { seed: 4, alpha: 0.3, n_train: 100, error: Error::EmptyDataset }),
        ];
        let s = results_to_string(&cells, &ctx()).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[2], "e,9,3,2,symmetric,0.2,NA,100,knn(k=10),none,0.5,0.01,NA,NA,NA,NA");
        assert_eq!(lines[3], "e,4,3,2,symmetric,0.3,NA,100,knn,none,FAILED,NA,NA,NA,NA,NA");
        let rows = read_results(&s).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].risk, Some(0.25));
        assert_eq!(rows[0].excess_risk, Some(0.25 - 0.2));
        assert_eq!(rows[1].bayes_risk, None);
        assert!(rows[2].failed && rows[2].risk.is_none());
    }

    #[test]
    fn schema_errors_name_columns() {
        let err = read_results("experiment_id,seed,K,d,noise,alpha\n").unwrap_err().to_string();
        assert!(err.contains("noise_kind") && err.contains("noise"), "{err}");
        let s = results_to_string(&[Ok(report(0.1, 0.25, 0.2))], &ctx()).unwrap();
        let broken = s.replace(",0.25,", ",abc,");
        let err = read_results(&broken).unwrap_err().to_string();
        assert!(err.contains("`risk`") && err.contains("line 2"), "{err}");
        assert!(read_results("").is_err());
    }
}
