//! Sign function for Bayesian event-rate estimates: with a uniform prior the
//! posteriors are X_i ~ Beta(d_i + 1, n_i − d_i + 1), and P(X₂ ≤ X₁) has a
//! finite-sum closed form.

use crate::error::{Error, Result};

fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

fn check_counts(d: u64, n: u64) -> Result<()> {
    if d > n {
        return Err(Error::InvalidCounts(format!("d = {d} exceeds n = {n}")));
    }
    Ok(())
}

/// P(X₂ ≤ X₁) for independent X₁ ~ Beta(d1+1, n1−d1+1), X₂ ~ Beta(d2+1, n2−d2+1):
///
/// C(n1+n2+2, n1+1)⁻¹ · Σ_{i=0}^{d1} C(d2+i, d2)·C(n1+n2+1−d2−i, n2−d2).
///
/// Terms are formed in the log domain and summed after a max shift. The
/// normalising binomial is replaced by the sum of this series and its
/// argument-swapped twin, which add up to it exactly; that cancels the
/// log-gamma rounding and keeps P + P_swap = 1 to a few ulps at large n.
pub fn bayes_sign_prob(d1: u64, n1: u64, d2: u64, n2: u64) -> Result<f64> {
    check_counts(d1, n1)?;
    check_counts(d2, n2)?;
    let below = log_terms(d1, n1, d2, n2);
    let above = log_terms(d2, n2, d1, n1);
    let top = below
        .iter()
        .chain(&above)
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let sum = |v: &[f64]| v.iter().map(|l| (l - top).exp()).sum::<f64>();
    let (b, a) = (sum(&below), sum(&above));
    Ok((b / (a + b)).clamp(0.0, 1.0))
}

fn log_terms(d1: u64, n1: u64, d2: u64, n2: u64) -> Vec<f64> {
    (0..=d1)
        .map(|i| ln_choose(d2 + i, d2) + ln_choose(n1 + n2 + 1 - d2 - i, n2 - d2))
        .collect()
}

/// P(X₁ > X₂) − P(X₁ < X₂), evaluated as P(X₂ ≤ X₁) − P(X₁ ≤ X₂) so that it
/// is exactly antisymmetric in its two arguments.
pub fn bayes_sign(d1: u64, n1: u64, d2: u64, n2: u64) -> Result<f64> {
    Ok(bayes_sign_prob(d1, n1, d2, n2)? - bayes_sign_prob(d2, n2, d1, n1)?)
}
