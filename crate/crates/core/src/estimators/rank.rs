//! Rank-based estimators: Kendall's tau-b and Spearman's rho, mapped to γ
//! through the bivariate normal relations τ = (2/π)·arcsin γ and
//! ρ_S = (6/π)·arcsin(γ/2).

use std::cmp::Ordering;
use std::f64::consts::PI;

use super::{CrossSectionEstimates, Estimator, GammaEstimate};
use crate::error::{Error, Result};

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: x.len(),
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

// total_cmp would order -0.0 before 0.0
fn cmp(a: f64, b: f64) -> Ordering {
    (a + 0.0).total_cmp(&(b + 0.0))
}

fn tied_pairs(sorted: &[f64]) -> i64 {
    sorted
        .chunk_by(|a, b| cmp(*a, *b) == Ordering::Equal)
        .map(|g| {
            let c = g.len() as i64;
            c * (c - 1) / 2
        })
        .sum()
}

/// Merge sort of `v` returning the number of strictly inverted pairs.
fn count_inversions(v: &mut [f64], buf: &mut Vec<f64>) -> i64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = count_inversions(&mut v[..mid], buf) + count_inversions(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if cmp(v[j], v[i]) == Ordering::Less {
            swaps += (mid - i) as i64;
            buf.push(v[j]);
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..]);
    v.copy_from_slice(buf);
    swaps
}

/// Kendall's tau-b with sign(0) = 0 (Knight's O(T log T) algorithm).
///
/// Returns `Ok(None)` when every pair is tied in one of the series, so the
/// tie-adjusted denominator vanishes.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    check_pair(x, y)?;
    let n = x.len() as i64;
    let pairs = n * (n - 1) / 2;

    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_unstable_by(|&a, &b| cmp(x[a], x[b]).then(cmp(y[a], y[b])));
    let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();

    let ties_x = tied_pairs(&xs);
    let ties_xy: i64 = idx
        .chunk_by(|&a, &b| cmp(x[a], x[b]) == Ordering::Equal && cmp(y[a], y[b]) == Ordering::Equal)
        .map(|g| {
            let c = g.len() as i64;
            c * (c - 1) / 2
        })
        .sum();
    let mut buf = Vec::with_capacity(ys.len());
    let discordant = count_inversions(&mut ys, &mut buf);
    let ties_y = tied_pairs(&ys);

    let nx = pairs - ties_x;
    let ny = pairs - ties_y;
    if nx == 0 || ny == 0 {
        return Ok(None);
    }
    let numerator = pairs - ties_x - ties_y + ties_xy - 2 * discordant;
    Ok(Some(numerator as f64 / ((nx as f64) * (ny as f64)).sqrt()))
}

/// Twice the centred midrank of each element, equal to Σ_{s≠t} sign(x_t − x_s).
fn centred_double_ranks(x: &[f64]) -> Vec<i64> {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_unstable_by(|&a, &b| cmp(x[a], x[b]));
    let mut out = vec![0i64; n];
    let mut start = 0;
    for group in idx.chunk_by(|&a, &b| cmp(x[a], x[b]) == Ordering::Equal) {
        let end = start + group.len();
        let c = (start + end) as i64 - n as i64;
        for &i in group {
            out[i] = c;
        }
        start = end;
    }
    out
}

/// Spearman's rho: Pearson correlation of midranks. `Ok(None)` when either
/// rank vector is constant.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    check_pair(x, y)?;
    let (rx, ry) = (centred_double_ranks(x), centred_double_ranks(y));
    let (mut sxy, mut sxx, mut syy) = (0i64, 0i64, 0i64);
    for (&a, &b) in rx.iter().zip(&ry) {
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if sxx == 0 || syy == 0 {
        return Ok(None);
    }
    Ok(Some(sxy as f64 / ((sxx as f64) * (syy as f64)).sqrt()))
}

/// γ^KEN = sin(π/2 · τ_b) on the event-rate series.
pub fn ken_gamma(cs: &CrossSectionEstimates) -> GammaEstimate {
    match kendall_tau_b(&cs.p_hat, &cs.p_hat_tilde) {
        Ok(Some(tau)) => GammaEstimate::from_raw(Estimator::Ken, (PI / 2.0 * tau).sin()),
        _ => GammaEstimate::degenerate(Estimator::Ken, 0.0),
    }
}

/// γ = 2·sin(π/6 · ρ_S) on the event-rate series.
pub fn spearman_gamma(cs: &CrossSectionEstimates) -> GammaEstimate {
    match spearman_rho(&cs.p_hat, &cs.p_hat_tilde) {
        // 2·sin(π/6) rounds to 1 − ε/2, so the endpoints are passed through
        Ok(Some(rho)) if rho.abs() == 1.0 => GammaEstimate::from_raw(Estimator::Spe, rho),
        Ok(Some(rho)) => GammaEstimate::from_raw(Estimator::Spe, 2.0 * (PI / 6.0 * rho).sin()),
        _ => GammaEstimate::degenerate(Estimator::Spe, 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_b_examples() {
        let t = kendall_tau_b(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0])
            .unwrap()
            .unwrap();
        assert!((t - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            kendall_tau_b(&[1.0, 2.0, 5.0], &[0.1, 0.2, 0.3]).unwrap(),
            Some(1.0)
        );
        let t = kendall_tau_b(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0])
            .unwrap()
            .unwrap();
        assert!((t - 2.0 / 6.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn tau_b_degenerate_and_errors() {
        assert_eq!(
            kendall_tau_b(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap(),
            None
        );
        assert!(matches!(
            kendall_tau_b(&[1.0, 2.0], &[1.0]),
            Err(Error::LengthMismatch(2, 1))
        ));
        assert!(matches!(
            kendall_tau_b(&[1.0], &[1.0]),
            Err(Error::TooShort { .. })
        ));
        assert!(matches!(
            kendall_tau_b(&[1.0, f64::NAN], &[1.0, 2.0]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn signed_zero_is_a_tie() {
        let t = kendall_tau_b(&[0.0, -0.0, 1.0], &[1.0, 2.0, 3.0])
            .unwrap()
            .unwrap();
        assert!((t - 2.0 / 6.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn spearman_transform() {
        let x = [0.1, 0.5, 0.2, 0.9];
        let cs = |y: &[f64]| CrossSectionEstimates {
            g: vec![0.0; 4],
            g_tilde: vec![0.0; 4],
            p_hat: x.to_vec(),
            p_hat_tilde: y.to_vec(),
        };
        let e = spearman_gamma(&cs(&[1.0, 5.0, 2.0, 9.0]));
        assert!((e.value - 1.0).abs() < 1e-15);
        let e = spearman_gamma(&cs(&[3.0, 3.0, 3.0, 3.0]));
        assert!(e.degenerate);
        // tau = 1/3 ⇒ γ = sin(π/6) = 1/2
        let k = ken_gamma(&CrossSectionEstimates {
            g: vec![0.0; 3],
            g_tilde: vec![0.0; 3],
            p_hat: vec![1.0, 2.0, 3.0],
            p_hat_tilde: vec![1.0, 3.0, 2.0],
        });
        assert!((k.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn midranks() {
        // ranks 1, 2.5, 2.5, 4 → doubled and centred: −3, 0, 0, 3
        assert_eq!(
            centred_double_ranks(&[1.0, 2.0, 2.0, 7.0]),
            vec![-3, 0, 0, 3]
        );
    }
}
