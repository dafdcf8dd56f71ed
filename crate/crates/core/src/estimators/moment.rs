//! Moment-matching estimators: IMM with its bias-corrected iterates, DMM and
//! the MAX combination of the two.

use super::{cross_section, CrossSectionEstimates, Estimator, GammaEstimate};
use crate::error::{Error, Result};
use crate::kernels::{solve_bvn_correlation, std_normal_cdf, std_normal_inv_cdf, Correlation};
use crate::model::{simulate_panel, PairModel, Panel, SectorParams};
use crate::rng::StreamKey;

/// Pearson sample correlation, `None` when either series has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx > 0.0 && syy > 0.0 {
        Some(sxy / (sxx * syy).sqrt())
    } else {
        None
    }
}

/// γ^IMM: Pearson correlation of the probit series.
pub fn imm(cs: &CrossSectionEstimates) -> GammaEstimate {
    match pearson(&cs.g, &cs.g_tilde) {
        Some(r) => GammaEstimate::from_raw(Estimator::Imm, r),
        None => GammaEstimate::degenerate(Estimator::Imm, 0.0),
    }
}

/// Normal-variance estimates of (p, ρ) from one probit series, inverting
/// E g = Φ⁻¹(p)/√(1−ρ) and Var g = ρ/(1−ρ).
pub fn intra_normal_variance(g: &[f64]) -> (f64, f64) {
    let t = g.len() as f64;
    let mean = g.iter().sum::<f64>() / t;
    let s2 = if g.len() > 1 {
        g.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (t - 1.0)
    } else {
        0.0
    };
    let rho = s2 / (1.0 + s2);
    (std_normal_cdf(mean * (1.0 - rho).sqrt()), rho)
}

// Simulation needs an interior sector; a constant probit series gives ρ̂ = 0.
const MIN_RHO: f64 = 1e-12;
const MIN_P: f64 = 1e-300;

fn simulation_sector(g: &[f64]) -> Result<SectorParams> {
    let (p, rho) = intra_normal_variance(g);
    SectorParams::new(
        p.clamp(MIN_P, 1.0 - f64::EPSILON),
        rho.clamp(MIN_RHO, 1.0 - MIN_RHO),
    )
}

/// Runs the IMM bias-correction iteration and returns the iterates for steps
/// 2..=`steps` (IM2, IM3).
///
/// Step k+1 simulates `m` panels with the data's cohort sizes at the
/// probit-implied (p̂, ρ̂) of each sector and γ = γ_k, then sets
/// γ_{k+1} = clamp(γ_k + γ^IMM − mean of the simulated IMM estimates), with
/// γ_1 = γ^IMM. (p̂, ρ̂) stay fixed at their first-step values.
pub fn bias_correction_path(
    panel: &Panel,
    cs: &CrossSectionEstimates,
    steps: usize,
    m: usize,
    key: StreamKey,
) -> Result<Vec<GammaEstimate>> {
    if !(2..=3).contains(&steps) {
        return Err(Error::InvalidParameter(format!(
            "bias correction supports 2 or 3 steps, got {steps}"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidParameter(
            "need at least one simulation".into(),
        ));
    }
    let labels = [Estimator::Im2, Estimator::Im3];
    let base = imm(cs);
    if base.degenerate {
        return Ok(labels[..steps - 1]
            .iter()
            .map(|&e| GammaEstimate::degenerate(e, 0.0))
            .collect());
    }

    let sector_a = simulation_sector(&cs.g)?;
    let sector_b = simulation_sector(&cs.g_tilde)?;
    let sizes = panel.sizes();

    let mut current = base.value;
    let mut out = Vec::with_capacity(steps - 1);
    for (step, &label) in labels[..steps - 1].iter().enumerate() {
        let model = PairModel::new(sector_a, sector_b, current)?;
        let step_key = key.child(step as u64);
        let mut total = 0.0;
        for i in 0..m {
            let mut rng = step_key.child(i as u64).rng();
            let sim = simulate_panel(&model, &sizes, &mut rng)?;
            total += imm(&cross_section(&sim)).value;
        }
        let raw = current + (base.value - total / m as f64);
        let est = GammaEstimate::from_raw(label, raw);
        current = est.value;
        out.push(est);
    }
    Ok(out)
}

/// γ^IM2 (`steps` = 2) or γ^IM3 (`steps` = 3).
pub fn imm_bias_corrected(
    panel: &Panel,
    steps: usize,
    m: usize,
    key: StreamKey,
) -> Result<GammaEstimate> {
    let cs = cross_section(panel);
    Ok(*bias_correction_path(panel, &cs, steps, m, key)?
        .last()
        .expect("at least one step"))
}

/// Intermediate moments of the DMM estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmmDecomposition {
    pub p_m: f64,
    pub p_m_tilde: f64,
    pub q_m: f64,
    pub p2_m: f64,
    pub p2_m_tilde: f64,
    pub rho_m: f64,
    pub rho_m_tilde: f64,
    pub delta_m: f64,
    pub gamma: f64,
}

// Solves p₂ = Φ₂(a, a, ρ); ρ = 0 when p₂ < p².
fn intra_from_p2(a: f64, p: f64, p2: f64) -> Result<f64> {
    if p2 < p * p {
        return Ok(0.0);
    }
    Ok(solve_bvn_correlation(a, a, p2)?.max(0.0))
}

/// γ^DMM = δ^M/√(ρ^M·ρ̃^M), where δ^M matches the cross moment q^M and ρ^M,
/// ρ̃^M match the second moments p₂^M, p̃₂^M. Requires every cohort size ≥ 2.
pub fn dmm(panel: &Panel) -> Result<(GammaEstimate, DmmDecomposition)> {
    let rows = panel.rows();
    if let Some(r) = rows.iter().find(|r| r.n < 2 || r.n_tilde < 2) {
        return Err(Error::InvalidPanel(format!(
            "date {}: second-moment estimate needs cohort sizes of at least 2",
            r.t
        )));
    }
    let t = rows.len() as f64;
    let (mut p_m, mut p_mt, mut q_m, mut p2_m, mut p2_mt) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for r in rows {
        let (d, n) = (r.d as f64, r.n as f64);
        let (dt, nt) = (r.d_tilde as f64, r.n_tilde as f64);
        p_m += d / n;
        p_mt += dt / nt;
        q_m += (d / n) * (dt / nt);
        p2_m += d * (d - 1.0) / (n * (n - 1.0));
        p2_mt += dt * (dt - 1.0) / (nt * (nt - 1.0));
    }
    let mut dec = DmmDecomposition {
        p_m: p_m / t,
        p_m_tilde: p_mt / t,
        q_m: q_m / t,
        p2_m: p2_m / t,
        p2_m_tilde: p2_mt / t,
        rho_m: 0.0,
        rho_m_tilde: 0.0,
        delta_m: 0.0,
        gamma: 0.0,
    };
    let interior = |p: f64| p > 0.0 && p < 1.0;
    if !interior(dec.p_m) || !interior(dec.p_m_tilde) {
        return Ok((GammaEstimate::degenerate(Estimator::Dmm, 0.0), dec));
    }

    let a = std_normal_inv_cdf(dec.p_m)?;
    let b = std_normal_inv_cdf(dec.p_m_tilde)?;
    dec.delta_m = solve_bvn_correlation(a, b, dec.q_m)?;
    dec.rho_m = intra_from_p2(a, dec.p_m, dec.p2_m)?;
    dec.rho_m_tilde = intra_from_p2(b, dec.p_m_tilde, dec.p2_m_tilde)?;

    let scale = (dec.rho_m * dec.rho_m_tilde).sqrt();
    let est = if scale > 0.0 {
        GammaEstimate::from_raw(Estimator::Dmm, dec.delta_m / scale)
    } else if dec.delta_m.abs() <= 1e-12 {
        GammaEstimate::degenerate(Estimator::Dmm, 0.0)
    } else {
        GammaEstimate::degenerate(Estimator::Dmm, dec.delta_m.signum())
    };
    dec.gamma = est.value;
    Ok((est, dec))
}

/// γ^MAX: whichever of IMM and DMM is larger in absolute value; ties go to DMM.
pub fn max_estimator(imm: &GammaEstimate, dmm: &GammaEstimate) -> GammaEstimate {
    let chosen = if imm.value.abs() > dmm.value.abs() {
        imm
    } else {
        dmm
    };
    GammaEstimate {
        value: Correlation::clamped(chosen.value).0.get(),
        method: Estimator::Max,
        clamped: chosen.clamped,
        degenerate: chosen.degenerate,
    }
}
