//! Per-scenario result CSV: one row per (scenario, estimator), floats in
//! shortest round-trip form so that re-reading a file is lossless.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::{EstimatorStats, ScenarioStats};
use crate::error::{Error, Result};
use crate::estimators::Estimator;

pub const RESULT_HEADER: [&str; 17] = [
    "T",
    "n",
    "p",
    "rho",
    "gamma",
    "estimator",
    "bias",
    "std",
    "rmse",
    "min",
    "q05",
    "q25",
    "q50",
    "q75",
    "q95",
    "max",
    "degenerate_count",
];

pub fn write_results<W: Write>(writer: W, results: &[ScenarioStats]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    wtr.write_record(RESULT_HEADER)?;
    for s in results {
        for e in &s.estimators {
            wtr.write_record([
                s.t.to_string(),
                s.n.to_string(),
                s.p.to_string(),
                s.rho.to_string(),
                s.gamma.to_string(),
                e.estimator.to_string(),
                e.bias.to_string(),
                e.std.to_string(),
                e.rmse.to_string(),
                e.min.to_string(),
                e.q05.to_string(),
                e.q25.to_string(),
                e.q50.to_string(),
                e.q75.to_string(),
                e.q95.to_string(),
                e.max.to_string(),
                e.degenerate_count.to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.trim().parse().map_err(|_| {
        Error::Config(format!(
            "results line {line}: cannot parse {} = '{raw}'",
            RESULT_HEADER[i]
        ))
    })
}

/// Reads a result CSV, grouping consecutive estimator rows back into
/// scenarios in order of first appearance.
pub fn read_results<R: Read>(reader: R) -> Result<Vec<ScenarioStats>> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(reader);
    if rdr.headers()?.iter().ne(RESULT_HEADER.iter().copied()) {
        return Err(Error::Config(
            "results file has an unexpected header".into(),
        ));
    }
    let mut order: Vec<[u64; 5]> = Vec::new();
    let mut by_key: BTreeMap<[u64; 5], ScenarioStats> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let t: usize = field(&rec, 0, line)?;
        let n: u64 = field(&rec, 1, line)?;
        let p: f64 = field(&rec, 2, line)?;
        let rho: f64 = field(&rec, 3, line)?;
        let gamma: f64 = field(&rec, 4, line)?;
        let estimator: Estimator = field(&rec, 5, line)?;
        let stats = EstimatorStats {
            estimator,
            bias: field(&rec, 6, line)?,
            std: field(&rec, 7, line)?,
            rmse: field(&rec, 8, line)?,
            min: field(&rec, 9, line)?,
            q05: field(&rec, 10, line)?,
            q25: field(&rec, 11, line)?,
            q50: field(&rec, 12, line)?,
            q75: field(&rec, 13, line)?,
            q95: field(&rec, 14, line)?,
            max: field(&rec, 15, line)?,
            degenerate_count: field(&rec, 16, line)?,
        };
        let key = [t as u64, n, p.to_bits(), rho.to_bits(), gamma.to_bits()];
        let entry = by_key.entry(key).or_insert_with(|| {
            order.push(key);
            ScenarioStats {
                t,
                n,
                p,
                rho,
                gamma,
                estimators: Vec::new(),
            }
        });
        if entry.get(estimator).is_some() {
            return Err(Error::Config(format!(
                "results line {line}: duplicate {estimator} row for one scenario"
            )));
        }
        entry.estimators.push(stats);
    }
    Ok(order
        .into_iter()
        .map(|k| by_key.remove(&k).expect("inserted above"))
        .collect())
}
