use serde::{Deserialize, Serialize};

use super::ScenarioSpec;
use crate::error::{Error, Result};
use crate::estimators::Estimator;

/// Study grid read from TOML. Scenarios are the full factorial product of
/// the five parameter lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "T")]
    pub t: Vec<usize>,
    pub n: Vec<u64>,
    pub p: Vec<f64>,
    pub rho: Vec<f64>,
    pub gamma: Vec<f64>,
    pub reps: usize,
    pub m: usize,
    pub seed: u64,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<String>,
}

fn default_estimators() -> Vec<String> {
    Estimator::STUDY
        .iter()
        .map(|e| e.name().to_string())
        .collect()
}

impl GridConfig {
    /// Desk-scale profile: a small slice around T = 100, n = 400,
    /// p = ρ = 4 %, with 1,000 replications and 25 bias-correction
    /// simulations.
    pub fn desk() -> Self {
        Self {
            t: vec![25, 100, 400],
            n: vec![400],
            p: vec![0.04],
            rho: vec![0.04],
            gamma: vec![0.0, 0.25, 1.0],
            reps: 1_000,
            m: 25,
            seed: 20_240_601,
            estimators: default_estimators(),
        }
    }

    /// The full reference grid: 6·6·6·6·7 = 9072 scenarios, 10,000
    /// replications each, 100 bias-correction simulations.
    pub fn full() -> Self {
        Self {
            t: vec![25, 50, 100, 200, 400, 800],
            n: vec![100, 200, 400, 800, 1600, 3200],
            p: vec![0.01, 0.02, 0.04, 0.08, 0.16, 0.32],
            rho: vec![0.01, 0.02, 0.04, 0.08, 0.16, 0.32],
            gamma: vec![-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0],
            reps: 10_000,
            m: 100,
            seed: 20_240_601,
            estimators: default_estimators(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.estimator_set()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("grid config serialises")
    }

    pub fn estimator_set(&self) -> Result<Vec<Estimator>> {
        Estimator::parse_list(&self.estimators.join(","))
    }

    pub fn scenarios(&self) -> Result<Vec<ScenarioSpec>> {
        let lists = [
            self.t.len(),
            self.n.len(),
            self.p.len(),
            self.rho.len(),
            self.gamma.len(),
        ];
        if lists.contains(&0) {
            return Err(Error::Config(
                "every parameter list must be nonempty".into(),
            ));
        }
        let estimators = self.estimator_set()?;
        let mut out = Vec::with_capacity(lists.iter().product());
        for &t in &self.t {
            for &n in &self.n {
                for &p in &self.p {
                    for &rho in &self.rho {
                        for &gamma in &self.gamma {
                            let spec = ScenarioSpec {
                                t,
                                n,
                                p,
                                rho,
                                gamma,
                                reps: self.reps,
                                m: self.m,
                                seed: self.seed,
                            };
                            spec.validate(&estimators)?;
                            out.push(spec);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}
