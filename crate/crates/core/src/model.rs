//! Two-sector Vasicek model: parameters, implied moments, and simulation of
//! latent factors and panel event counts.

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{bvn_cdf, std_normal_cdf, std_normal_inv_cdf, Correlation, Probability};

/// Mean event probability `p` and intra-sector asset correlation `rho` of one
/// sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorParams {
    p: Probability,
    rho: f64,
    threshold: f64,
}

impl SectorParams {
    /// Requires `0 < p < 1` and `0 < rho < 1`.
    pub fn new(p: f64, rho: f64) -> Result<Self> {
        let p = Probability::interior(p)?;
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "intra-sector correlation {rho} outside (0, 1)"
            )));
        }
        Ok(Self {
            p,
            rho,
            threshold: std_normal_inv_cdf(p.get())?,
        })
    }

    pub fn p(&self) -> f64 {
        self.p.get()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Φ⁻¹(p).
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn moments(&self) -> SectorMoments {
        let scale = (1.0 - self.rho).sqrt();
        SectorMoments {
            mu: self.threshold / scale,
            sigma2: self.rho / (1.0 - self.rho),
            p2: bvn_cdf(self.threshold, self.threshold, self.rho),
        }
    }
}

/// Two sectors and the correlation `gamma` of their systematic factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairModel {
    pub sector_a: SectorParams,
    pub sector_b: SectorParams,
    pub gamma: Correlation,
}

impl PairModel {
    pub fn new(sector_a: SectorParams, sector_b: SectorParams, gamma: f64) -> Result<Self> {
        Ok(Self {
            sector_a,
            sector_b,
            gamma: Correlation::new(gamma)?,
        })
    }

    /// Both sectors share `(p, rho)`.
    pub fn symmetric(p: f64, rho: f64, gamma: f64) -> Result<Self> {
        let s = SectorParams::new(p, rho)?;
        Self::new(s, s, gamma)
    }
}

/// Moments of Φ⁻¹(P) and P for one sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorMoments {
    /// E Φ⁻¹(P)
    pub mu: f64,
    /// Var Φ⁻¹(P)
    pub sigma2: f64,
    /// E P²
    pub p2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMoments {
    pub sector_a: SectorMoments,
    pub sector_b: SectorMoments,
    /// E(P·P̃)
    pub q: f64,
}

/// Conditional event probability P(y) = Φ((Φ⁻¹(p) − √ρ·y)/√(1−ρ)).
pub fn mixing_prob(sector: &SectorParams, y: f64) -> f64 {
    std_normal_cdf(probit_mixing(sector, y))
}

/// Φ⁻¹(P(y)), the probit of the conditional event probability.
pub fn probit_mixing(sector: &SectorParams, y: f64) -> f64 {
    (sector.threshold - sector.rho.sqrt() * y) / (1.0 - sector.rho).sqrt()
}

pub fn pair_moments(model: &PairModel) -> PairMoments {
    let (a, b) = (&model.sector_a, &model.sector_b);
    let delta = model.gamma.get() * (a.rho * b.rho).sqrt();
    PairMoments {
        sector_a: a.moments(),
        sector_b: b.moments(),
        q: bvn_cdf(a.threshold, b.threshold, delta),
    }
}

/// Draws the latent factor pair (Y, Ỹ) with correlation γ as
/// Ỹ = γ·Y + √(1−γ²)·Z. At γ = ±1 the pair is exactly comonotone or
/// countermonotone.
pub fn simulate_latent<R: Rng + ?Sized>(model: &PairModel, rng: &mut R) -> (f64, f64) {
    let y: f64 = rng.sample(StandardNormal);
    let z: f64 = rng.sample(StandardNormal);
    let g = model.gamma.get();
    let y_tilde = g * y + ((1.0 - g) * (1.0 + g)).sqrt() * z;
    (y, y_tilde)
}

/// One observation date: cohort sizes and event counts of both sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanelRow {
    pub t: u64,
    pub n: u64,
    pub d: u64,
    pub n_tilde: u64,
    pub d_tilde: u64,
}

impl PanelRow {
    fn validate(&self) -> std::result::Result<(), String> {
        if self.n == 0 || self.n_tilde == 0 {
            return Err(format!("date {}: cohort sizes must be positive", self.t));
        }
        if self.d > self.n {
            return Err(format!(
                "date {}: d = {} exceeds n = {}",
                self.t, self.d, self.n
            ));
        }
        if self.d_tilde > self.n_tilde {
            return Err(format!(
                "date {}: d_tilde = {} exceeds n_tilde = {}",
                self.t, self.d_tilde, self.n_tilde
            ));
        }
        Ok(())
    }
}

/// Event-count time series over T > 1 observation dates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Panel {
    rows: Vec<PanelRow>,
}

pub const PANEL_HEADER: [&str; 5] = ["t", "n", "d", "n_tilde", "d_tilde"];

impl Panel {
    pub fn new(rows: Vec<PanelRow>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InvalidPanel(format!(
                "need T > 1 observation dates, got {}",
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            row.validate().map_err(Error::InvalidPanel)?;
            if i > 0 && row.t <= rows[i - 1].t {
                return Err(Error::InvalidPanel(format!(
                    "date indices must be strictly increasing ({} after {})",
                    row.t,
                    rows[i - 1].t
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[PanelRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn sizes(&self) -> Vec<(u64, u64)> {
        self.rows.iter().map(|r| (r.n, r.n_tilde)).collect()
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().ne(PANEL_HEADER.iter().copied()) {
            return Err(Error::InvalidPanel(format!(
                "line 1: expected header {}, found {}",
                PANEL_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows = Vec::new();
        for record in rdr.deserialize::<PanelRow>() {
            let row = record?;
            if let Err(msg) = row.validate() {
                return Err(Error::InvalidPanel(format!(
                    "line {}: {msg}",
                    rows.len() + 2
                )));
            }
            rows.push(row);
        }
        Self::new(rows)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        for row in &self.rows {
            wtr.serialize(row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Simulates one panel: per date a latent pair, then conditionally
/// independent binomial counts in both sectors.
pub fn simulate_panel<R: Rng + ?Sized>(
    model: &PairModel,
    sizes: &[(u64, u64)],
    rng: &mut R,
) -> Result<Panel> {
    if sizes.len() < 2 {
        return Err(Error::InvalidPanel(format!(
            "need at least two observation dates, got {}",
            sizes.len()
        )));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for (i, &(n, n_tilde)) in sizes.iter().enumerate() {
        if n == 0 || n_tilde == 0 {
            return Err(Error::InvalidPanel("cohort sizes must be positive".into()));
        }
        let (y, y_tilde) = simulate_latent(model, rng);
        let d = binomial(n, mixing_prob(&model.sector_a, y), rng);
        let d_tilde = binomial(n_tilde, mixing_prob(&model.sector_b, y_tilde), rng);
        rows.push(PanelRow {
            t: i as u64 + 1,
            n,
            d,
            n_tilde,
            d_tilde,
        });
    }
    Ok(Panel { rows })
}

fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    Binomial::new(n, p)
        .expect("conditional probability lies in [0, 1]")
        .sample(rng)
}
