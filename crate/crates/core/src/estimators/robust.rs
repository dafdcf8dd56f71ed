use super::{CrossSectionEstimates, Estimator, GammaEstimate};

/// Sample median; even lengths average the two middle order statistics.
pub fn median(x: &[f64]) -> f64 {
    assert!(!x.is_empty(), "median of an empty sample");
    let mut v = x.to_vec();
    let mid = v.len() / 2;
    let (lower, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if x.len() % 2 == 1 {
        upper
    } else {
        let lower_max = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lower_max + upper) / 2.0
    }
}

/// Median absolute deviation about the median, without consistency factor.
pub fn mad(x: &[f64]) -> f64 {
    let m = median(x);
    let dev: Vec<f64> = x.iter().map(|v| (v - m).abs()).collect();
    median(&dev)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MadDiagnostics {
    pub mad_u: f64,
    pub mad_v: f64,
}

/// γ^MAD = (MAD²(u) − MAD²(v))/(MAD²(u) + MAD²(v)) with u, v the sum and
/// difference of the median/MAD-standardised probit series.
pub fn mad_estimator(cs: &CrossSectionEstimates) -> (GammaEstimate, MadDiagnostics) {
    let (mx, my) = (mad(&cs.g), mad(&cs.g_tilde));
    if mx == 0.0 || my == 0.0 {
        let diag = MadDiagnostics {
            mad_u: 0.0,
            mad_v: 0.0,
        };
        return (GammaEstimate::degenerate(Estimator::Mad, 0.0), diag);
    }
    let (cx, cy) = (median(&cs.g), median(&cs.g_tilde));
    let (mut u, mut v) = (Vec::with_capacity(cs.len()), Vec::with_capacity(cs.len()));
    for (&a, &b) in cs.g.iter().zip(&cs.g_tilde) {
        let (za, zb) = ((a - cx) / mx, (b - cy) / my);
        u.push(za + zb);
        v.push(za - zb);
    }
    let diag = MadDiagnostics {
        mad_u: mad(&u),
        mad_v: mad(&v),
    };
    let (su, sv) = (diag.mad_u * diag.mad_u, diag.mad_v * diag.mad_v);
    if su + sv == 0.0 {
        return (GammaEstimate::degenerate(Estimator::Mad, 0.0), diag);
    }
    (
        GammaEstimate::from_raw(Estimator::Mad, (su - sv) / (su + sv)),
        diag,
    )
}
