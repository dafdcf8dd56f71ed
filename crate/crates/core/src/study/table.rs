//! Stratified summaries: average each statistic over all scenarios that share
//! one level of a grid parameter, plus an overall-average row.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use super::ScenarioStats;
use crate::error::{Error, Result};
use crate::estimators::Estimator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StratVar {
    T,
    N,
    P,
    Rho,
    Gamma,
}

impl StratVar {
    pub const ALL: [StratVar; 5] = [
        StratVar::T,
        StratVar::N,
        StratVar::P,
        StratVar::Rho,
        StratVar::Gamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StratVar::T => "T",
            StratVar::N => "n",
            StratVar::P => "p",
            StratVar::Rho => "rho",
            StratVar::Gamma => "gamma",
        }
    }

    fn level(self, s: &ScenarioStats) -> f64 {
        match self {
            StratVar::T => s.t as f64,
            StratVar::N => s.n as f64,
            StratVar::P => s.p,
            StratVar::Rho => s.rho,
            StratVar::Gamma => s.gamma,
        }
    }
}

impl fmt::Display for StratVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StratVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "T" | "t" => Ok(StratVar::T),
            "n" | "N" => Ok(StratVar::N),
            "p" | "P" => Ok(StratVar::P),
            "rho" | "RHO" => Ok(StratVar::Rho),
            "gamma" | "GAMMA" => Ok(StratVar::Gamma),
            other => Err(Error::Config(format!(
                "unknown stratification variable '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    Bias,
    Std,
    Rmse,
    Min,
    Q05,
    Q25,
    Q50,
    Q75,
    Q95,
    Max,
    Degenerate,
}

impl Statistic {
    pub const ALL: [Statistic; 11] = [
        Statistic::Bias,
        Statistic::Std,
        Statistic::Rmse,
        Statistic::Min,
        Statistic::Q05,
        Statistic::Q25,
        Statistic::Q50,
        Statistic::Q75,
        Statistic::Q95,
        Statistic::Max,
        Statistic::Degenerate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Bias => "bias",
            Statistic::Std => "std",
            Statistic::Rmse => "rmse",
            Statistic::Min => "min",
            Statistic::Q05 => "q05",
            Statistic::Q25 => "q25",
            Statistic::Q50 => "q50",
            Statistic::Q75 => "q75",
            Statistic::Q95 => "q95",
            Statistic::Max => "max",
            Statistic::Degenerate => "degenerate_count",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    /// Comma-separated list of statistic names.
    pub fn parse_list(s: &str) -> Result<Vec<Statistic>> {
        s.split(',').map(str::parse).collect()
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "degenerate" {
            return Ok(Statistic::Degenerate);
        }
        Statistic::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown statistic '{s}'")))
    }
}

/// One level of the stratification variable. `means[e][s]` is the average of
/// statistic `s` of estimator `e` over the `scenarios` at this level.
#[derive(Debug, Clone, PartialEq)]
pub struct StratRow {
    pub level: f64,
    pub scenarios: usize,
    pub means: Vec<[f64; 11]>,
}

impl StratRow {
    fn from_group(level: f64, group: &[&ScenarioStats], estimators: &[Estimator]) -> Self {
        let mut means = vec![[0.0; 11]; estimators.len()];
        for s in group {
            for (j, &e) in estimators.iter().enumerate() {
                let st = s.get(e).expect("estimator sets checked");
                for stat in Statistic::ALL {
                    means[j][stat.index()] += st.get(stat);
                }
            }
        }
        let k = group.len() as f64;
        means.iter_mut().flatten().for_each(|v| *v /= k);
        Self {
            level,
            scenarios: group.len(),
            means,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StratifiedTable {
    pub var: StratVar,
    pub estimators: Vec<Estimator>,
    /// Levels in ascending order.
    pub rows: Vec<StratRow>,
    /// Unweighted mean over every scenario.
    pub average: StratRow,
}

fn distinct(results: &[&ScenarioStats], var: StratVar) -> Vec<f64> {
    let set: BTreeSet<u64> = results.iter().map(|s| var.level(s).to_bits()).collect();
    let mut levels: Vec<f64> = set.into_iter().map(f64::from_bits).collect();
    levels.sort_by(f64::total_cmp);
    levels
}

/// Stratifies `results` by `var`, optionally restricted to scenarios with
/// γ = `filter_gamma` first. The (filtered) results must form a full
/// factorial grid with one common estimator list.
pub fn stratify(
    results: &[ScenarioStats],
    var: StratVar,
    filter_gamma: Option<f64>,
) -> Result<StratifiedTable> {
    let kept: Vec<&ScenarioStats> = results
        .iter()
        .filter(|s| filter_gamma.is_none_or(|g| (s.gamma - g).abs() <= 1e-12))
        .collect();
    if kept.is_empty() {
        return Err(Error::NonFactorial("no scenarios left to stratify".into()));
    }

    let estimators: Vec<Estimator> = kept[0].estimators.iter().map(|e| e.estimator).collect();
    if kept.iter().any(|s| {
        s.estimators
            .iter()
            .map(|e| e.estimator)
            .ne(estimators.iter().copied())
    }) {
        return Err(Error::NonFactorial(
            "scenarios report different estimator sets".into(),
        ));
    }

    let cells: usize = StratVar::ALL
        .iter()
        .map(|&v| distinct(&kept, v).len())
        .product();
    let combos: BTreeSet<[u64; 5]> = kept
        .iter()
        .map(|s| StratVar::ALL.map(|v| v.level(s).to_bits()))
        .collect();
    if combos.len() != kept.len() || cells != kept.len() {
        return Err(Error::NonFactorial(format!(
            "{} scenarios ({} distinct) do not fill a {cells}-cell factorial grid",
            kept.len(),
            combos.len()
        )));
    }

    let rows = distinct(&kept, var)
        .into_iter()
        .map(|level| {
            let group: Vec<&ScenarioStats> = kept
                .iter()
                .copied()
                .filter(|s| var.level(s).to_bits() == level.to_bits())
                .collect();
            StratRow::from_group(level, &group, &estimators)
        })
        .collect();
    let average = StratRow::from_group(f64::NAN, &kept, &estimators);
    Ok(StratifiedTable {
        var,
        estimators,
        rows,
        average,
    })
}

impl StratifiedTable {
    pub fn value(&self, row: &StratRow, estimator: Estimator, stat: Statistic) -> Option<f64> {
        let j = self.estimators.iter().position(|&e| e == estimator)?;
        Some(row.means[j][stat.index()])
    }

    fn header(&self, stats: &[Statistic]) -> Vec<String> {
        let mut h = vec![self.var.name().to_string()];
        for s in stats {
            for e in &self.estimators {
                h.push(format!("{s}_{e}"));
            }
        }
        h
    }

    fn cells(
        &self,
        row: &StratRow,
        stats: &[Statistic],
        fmt: impl Fn(f64) -> String,
    ) -> Vec<String> {
        let mut out = Vec::with_capacity(1 + stats.len() * self.estimators.len());
        out.push(if row.level.is_nan() {
            "avg".to_string()
        } else {
            row.level.to_string()
        });
        for &s in stats {
            for j in 0..self.estimators.len() {
                out.push(fmt(row.means[j][s.index()]));
            }
        }
        out
    }

    fn all_rows(&self) -> impl Iterator<Item = &StratRow> {
        self.rows.iter().chain(std::iter::once(&self.average))
    }

    /// CSV at full precision; the last row has level `avg`.
    pub fn to_csv(&self, stats: &[Statistic]) -> String {
        let mut out = self.header(stats).join(",");
        out.push('\n');
        for row in self.all_rows() {
            out.push_str(&self.cells(row, stats, |v| v.to_string()).join(","));
            out.push('\n');
        }
        out
    }

    /// Pipe table with right-aligned columns and 6 decimals.
    pub fn to_markdown(&self, stats: &[Statistic]) -> String {
        let header = self.header(stats);
        let body: Vec<Vec<String>> = self
            .all_rows()
            .map(|r| self.cells(r, stats, |v| format!("{v:.6}")))
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|c| {
                body.iter()
                    .map(|r| r[c].len())
                    .chain([header[c].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();

        let mut out = String::new();
        let line = |out: &mut String, cells: &[String]| {
            out.push('|');
            for (cell, w) in cells.iter().zip(&widths) {
                let _ = write!(out, " {cell:>w$} |");
            }
            out.push('\n');
        };
        line(&mut out, &header);
        out.push('|');
        for w in &widths {
            let _ = write!(out, " {}: |", "-".repeat(w - 1));
        }
        out.push('\n');
        for r in &body {
            line(&mut out, r);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::study::EstimatorStats;

    fn est(e: Estimator, x: f64) -> EstimatorStats {
        EstimatorStats {
            estimator: e,
            bias: x,
            std: 2.0 * x,
            rmse: 3.0 * x,
            min: -x,
            q05: 0.0,
            q25: 0.0,
            q50: x,
            q75: x,
            q95: x,
            max: x,
            degenerate_count: 1,
        }
    }

    fn grid(f: impl Fn(usize, f64) -> f64) -> Vec<ScenarioStats> {
        let mut out = Vec::new();
        for t in [25, 100] {
            for gamma in [0.0, 0.25, 1.0] {
                out.push(ScenarioStats {
                    t,
                    n: 400,
                    p: 0.04,
                    rho: 0.04,
                    gamma,
                    estimators: vec![
                        est(Estimator::Imm, f(t, gamma)),
                        est(Estimator::Dmm, -f(t, gamma)),
                    ],
                });
            }
        }
        out
    }

    #[test]
    fn unweighted_level_means() {
        let res = grid(|t, g| t as f64 + g);
        let tab = stratify(&res, StratVar::T, None).unwrap();
        assert_eq!(tab.rows.len(), 2);
        assert_eq!(tab.rows[0].level, 25.0);
        assert_eq!(tab.rows[0].scenarios, 3);
        let v = tab
            .value(&tab.rows[0], Estimator::Imm, Statistic::Bias)
            .unwrap();
        assert!((v - (25.0 + 1.25 / 3.0)).abs() < 1e-12);
        let avg = tab
            .value(&tab.average, Estimator::Dmm, Statistic::Rmse)
            .unwrap();
        assert!((avg + 3.0 * (62.5 + 1.25 / 3.0)).abs() < 1e-12);
        assert_eq!(
            tab.value(&tab.average, Estimator::Imm, Statistic::Degenerate),
            Some(1.0)
        );

        let by_gamma = stratify(&res, StratVar::Gamma, None).unwrap();
        assert_eq!(
            by_gamma.rows.iter().map(|r| r.level).collect::<Vec<_>>(),
            [0.0, 0.25, 1.0]
        );
    }

    #[test]
    fn identical_and_single_scenarios() {
        let res = grid(|_, _| 0.5);
        let tab = stratify(&res, StratVar::Gamma, None).unwrap();
        for row in tab.rows.iter().chain([&tab.average]) {
            assert_eq!(tab.value(row, Estimator::Imm, Statistic::Std), Some(1.0));
        }
        let one = &res[..1];
        let tab = stratify(one, StratVar::P, None).unwrap();
        assert_eq!(tab.rows.len(), 1);
        for s in Statistic::ALL {
            assert_eq!(
                tab.value(&tab.rows[0], Estimator::Dmm, s),
                Some(one[0].estimators[1].get(s))
            );
        }
    }

    #[test]
    fn gamma_filter_then_factorial_check() {
        let res = grid(|t, g| t as f64 * g);
        let tab = stratify(&res, StratVar::T, Some(0.25)).unwrap();
        assert_eq!(
            tab.rows.iter().map(|r| r.scenarios).collect::<Vec<_>>(),
            [1, 1]
        );
        assert_eq!(
            tab.value(&tab.rows[1], Estimator::Imm, Statistic::Bias),
            Some(25.0)
        );
        assert!(stratify(&res, StratVar::T, Some(0.5)).is_err());

        let mut holey = res.clone();
        holey.remove(2);
        assert!(matches!(
            stratify(&holey, StratVar::T, None),
            Err(Error::NonFactorial(_))
        ));
        let mut dup = res.clone();
        dup.push(res[0].clone());
        assert!(stratify(&dup, StratVar::T, None).is_err());
        let mut mixed = res;
        mixed[0].estimators.pop();
        assert!(stratify(&mixed, StratVar::T, None).is_err());
    }

    #[test]
    fn renderings() {
        let tab = stratify(&grid(|t, g| t as f64 / 1000.0 + g), StratVar::T, None).unwrap();
        let csv = tab.to_csv(&[Statistic::Std, Statistic::Rmse]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "T,std_IMM,std_DMM,rmse_IMM,rmse_DMM");
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("avg,"));

        let md = tab.to_markdown(&[Statistic::Bias]);
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines.iter().all(|l| l.len() == lines[0].len()));
        assert!(lines[2].contains("0.441667"), "{md}");
        assert!(lines[4].contains("avg"));
    }

    #[test]
    fn parsing() {
        assert_eq!("rho".parse::<StratVar>().unwrap(), StratVar::Rho);
        assert!("x".parse::<StratVar>().is_err());
        assert_eq!(
            Statistic::parse_list("std, rmse,degenerate").unwrap(),
            [Statistic::Std, Statistic::Rmse, Statistic::Degenerate]
        );
        assert!(Statistic::parse_list("mean").is_err());
    }
}
