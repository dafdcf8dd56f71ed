//! Monte Carlo study harness: replicate panels per scenario, summarise each
//! estimator's sampling distribution, and aggregate over a parameter grid.
//!
//! Every random draw is keyed by (master seed, scenario parameters,
//! replication, role), so results do not depend on thread count, execution
//! order or on which other scenarios share the grid.

mod config;
mod results;
mod table;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use config::GridConfig;
pub use results::{read_results, write_results, RESULT_HEADER};
pub use table::{stratify, Statistic, StratRow, StratVar, StratifiedTable};

use crate::error::{Error, Result};
use crate::estimators::{estimate_panel, Estimator};
use crate::model::{simulate_panel, PairModel};
use crate::rng::StreamKey;

const ROLE_PANEL: u64 = 0;
const ROLE_BIAS: u64 = 1;

/// One point of the study grid. Both sectors share `n`, `p` and `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub t: usize,
    pub n: u64,
    pub p: f64,
    pub rho: f64,
    pub gamma: f64,
    pub reps: usize,
    /// Simulations per bias-correction step (IM2/IM3).
    pub m: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn model(&self) -> Result<PairModel> {
        PairModel::symmetric(self.p, self.rho, self.gamma)
    }

    pub fn validate(&self, estimators: &[Estimator]) -> Result<()> {
        self.model()?;
        if self.t < 2 {
            return Err(Error::Config(format!("T = {} must exceed 1", self.t)));
        }
        if self.n == 0 {
            return Err(Error::Config("n must be positive".into()));
        }
        if self.n < 2
            && estimators
                .iter()
                .any(|e| matches!(e, Estimator::Dmm | Estimator::Max))
        {
            return Err(Error::Config("DMM needs n >= 2".into()));
        }
        if self.reps == 0 {
            return Err(Error::Config("reps must be positive".into()));
        }
        if self.m == 0
            && estimators
                .iter()
                .any(|e| matches!(e, Estimator::Im2 | Estimator::Im3))
        {
            return Err(Error::Config("IM2/IM3 need m >= 1".into()));
        }
        Ok(())
    }

    /// Stream key of this scenario: master seed and model parameters only.
    pub fn key(&self) -> StreamKey {
        StreamKey::new(self.seed)
            .child(self.t as u64)
            .child(self.n)
            .child(self.p.to_bits())
            .child(self.rho.to_bits())
            .child(self.gamma.to_bits())
    }

    /// Replication `rep` of this scenario.
    pub fn simulate(&self, rep: usize) -> Result<crate::model::Panel> {
        let mut rng = self.key().child(rep as u64).child(ROLE_PANEL).rng();
        simulate_panel(&self.model()?, &vec![(self.n, self.n); self.t], &mut rng)
    }

    fn store_name(&self, estimators: &[Estimator]) -> String {
        let mut k = self.key().child(self.reps as u64).child(self.m as u64);
        for e in estimators {
            k = k.child(*e as u64 + 1);
        }
        format!("scenario-{:016x}.csv", k.value())
    }
}

/// Summary of one estimator over the replications of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorStats {
    pub estimator: Estimator,
    pub bias: f64,
    pub std: f64,
    pub rmse: f64,
    pub min: f64,
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
    pub max: f64,
    pub degenerate_count: u64,
}

impl EstimatorStats {
    /// Summarises `values` against the true γ. Quantiles interpolate linearly
    /// between order statistics at position (reps − 1)·q.
    pub fn from_values(
        estimator: Estimator,
        values: &[f64],
        truth: f64,
        degenerate_count: u64,
    ) -> Self {
        assert!(!values.is_empty());
        let reps = values.len() as f64;
        let mean = values.iter().sum::<f64>() / reps;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let sq_err: f64 = values.iter().map(|v| (v - truth) * (v - truth)).sum();
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            estimator,
            bias: mean - truth,
            std: if values.len() > 1 {
                (ss / (reps - 1.0)).sqrt()
            } else {
                0.0
            },
            rmse: (sq_err / reps).sqrt(),
            min: sorted[0],
            q05: quantile(&sorted, 0.05),
            q25: quantile(&sorted, 0.25),
            q50: quantile(&sorted, 0.50),
            q75: quantile(&sorted, 0.75),
            q95: quantile(&sorted, 0.95),
            max: sorted[sorted.len() - 1],
            degenerate_count,
        }
    }

    pub fn get(&self, s: Statistic) -> f64 {
        match s {
            Statistic::Bias => self.bias,
            Statistic::Std => self.std,
            Statistic::Rmse => self.rmse,
            Statistic::Min => self.min,
            Statistic::Q05 => self.q05,
            Statistic::Q25 => self.q25,
            Statistic::Q50 => self.q50,
            Statistic::Q75 => self.q75,
            Statistic::Q95 => self.q95,
            Statistic::Max => self.max,
            Statistic::Degenerate => self.degenerate_count as f64,
        }
    }
}

/// Linear interpolation between order statistics of an ascending sample.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Statistics of one scenario, one entry per requested estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioStats {
    pub t: usize,
    pub n: u64,
    pub p: f64,
    pub rho: f64,
    pub gamma: f64,
    pub estimators: Vec<EstimatorStats>,
}

impl ScenarioStats {
    pub fn get(&self, e: Estimator) -> Option<&EstimatorStats> {
        self.estimators.iter().find(|s| s.estimator == e)
    }
}

/// Raw per-replication estimates of one scenario, `values[e][rep]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSamples {
    pub estimators: Vec<Estimator>,
    pub values: Vec<Vec<f64>>,
    pub degenerate: Vec<Vec<bool>>,
}

/// Runs every replication of a scenario on the current rayon pool.
pub fn run_scenario_samples(
    spec: &ScenarioSpec,
    estimators: &[Estimator],
) -> Result<ScenarioSamples> {
    spec.validate(estimators)?;
    let per_rep: Vec<Vec<(f64, bool)>> = (0..spec.reps)
        .into_par_iter()
        .map(|rep| {
            let panel = spec.simulate(rep)?;
            let bias_key = spec.key().child(rep as u64).child(ROLE_BIAS);
            let reports = estimate_panel(&panel, estimators, spec.m, bias_key)?;
            Ok(reports
                .iter()
                .map(|r| (r.estimate.value, r.estimate.degenerate))
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut values = vec![Vec::with_capacity(spec.reps); estimators.len()];
    let mut degenerate = vec![Vec::with_capacity(spec.reps); estimators.len()];
    for rep in &per_rep {
        for (j, &(v, d)) in rep.iter().enumerate() {
            values[j].push(v);
            degenerate[j].push(d);
        }
    }
    Ok(ScenarioSamples {
        estimators: estimators.to_vec(),
        values,
        degenerate,
    })
}

pub fn run_scenario(spec: &ScenarioSpec, estimators: &[Estimator]) -> Result<ScenarioStats> {
    let samples = run_scenario_samples(spec, estimators)?;
    let stats = samples
        .estimators
        .iter()
        .zip(samples.values.iter().zip(&samples.degenerate))
        .map(|(&e, (v, d))| {
            EstimatorStats::from_values(e, v, spec.gamma, d.iter().filter(|x| **x).count() as u64)
        })
        .collect();
    Ok(ScenarioStats {
        t: spec.t,
        n: spec.n,
        p: spec.p,
        rho: spec.rho,
        gamma: spec.gamma,
        estimators: stats,
    })
}

/// Runs a grid with `parallelism` worker threads.
///
/// With a `store` directory each finished scenario is written to its own
/// result file, and scenarios whose file already exists are loaded instead of
/// recomputed. Failures are reported per scenario.
pub fn run_grid(
    grid: &[ScenarioSpec],
    parallelism: usize,
    estimators: &[Estimator],
    store: Option<&Path>,
) -> Result<Vec<Result<ScenarioStats>>> {
    if grid.is_empty() {
        return Err(Error::Config("empty grid".into()));
    }
    if let Some(dir) = store {
        fs::create_dir_all(dir)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        grid.iter()
            .map(|spec| match store {
                Some(dir) => run_stored(spec, estimators, &dir.join(spec.store_name(estimators))),
                None => run_scenario(spec, estimators),
            })
            .collect()
    }))
}

fn run_stored(
    spec: &ScenarioSpec,
    estimators: &[Estimator],
    path: &PathBuf,
) -> Result<ScenarioStats> {
    if path.exists() {
        let mut loaded = read_results(fs::File::open(path)?)?;
        if loaded.len() == 1 {
            return Ok(loaded.remove(0));
        }
    }
    let stats = run_scenario(spec, estimators)?;
    let tmp = path.with_extension("csv.tmp");
    {
        let file = fs::File::create(&tmp)?;
        write_results(file, std::slice::from_ref(&stats))?;
    }
    fs::rename(&tmp, path)?;
    Ok(stats)
}
