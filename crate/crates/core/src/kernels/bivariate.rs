//! Bivariate standard normal distribution function and its inversion in the
//! correlation argument.
//!
//! For r > 0, `bvn_cdf` follows Genz's BVNU (Drezner–Wesolowsky reduction to
//! a single integral over the correlation, Gauss–Legendre with 6/12/20 nodes
//! chosen by r, and an asymptotic expansion plus correction integral for
//! r ≥ 0.925). For r < 0 that reduction subtracts an integral from Φ(h)Φ(k)
//! and loses all relative accuracy in the lower tail, so the same integral is
//! instead taken from r = −1 upward, where every term is nonnegative.

use std::f64::consts::PI;

use super::normal::std_normal_cdf;
use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

const GL12_X: [f64; 6] = [
    0.981_560_634_246_719_1,
    0.904_117_256_370_475,
    0.769_902_674_194_305,
    0.587_317_954_286_617_1,
    0.367_831_498_998_180_2,
    0.125_233_408_511_469_2,
];
const GL12_W: [f64; 6] = [
    0.047_175_336_386_511_77,
    0.106_939_325_995_318_3,
    0.160_078_328_543_346_4,
    0.203_167_426_723_065_9,
    0.233_492_536_538_354_7,
    0.249_147_045_813_402_9,
];
const GL20_X: [f64; 10] = [
    0.993_128_599_185_094_9,
    0.963_971_927_277_913_8,
    0.912_234_428_251_325_9,
    0.839_116_971_822_218_8,
    0.746_331_906_460_150_8,
    0.636_053_680_726_515,
    0.510_867_001_950_827_1,
    0.373_706_088_715_419_6,
    0.227_785_851_141_645_1,
    0.076_526_521_133_497_33,
];
const GL20_W: [f64; 10] = [
    0.017_614_007_139_152_12,
    0.040_601_429_800_386_94,
    0.062_672_048_334_109_06,
    0.083_276_741_576_704_75,
    0.101_930_119_817_240_4,
    0.118_194_531_961_518_4,
    0.131_688_638_449_176_6,
    0.142_096_109_318_382_1,
    0.149_172_986_472_603_7,
    0.152_753_387_130_725_9,
];

fn gauss_legendre(r: f64) -> (&'static [f64], &'static [f64]) {
    let a = r.abs();
    if a < 0.75 {
        (&GL12_X, &GL12_W)
    } else {
        (&GL20_X, &GL20_W)
    }
}

/// Φ₂(h, k, r) = P(X ≤ h, Y ≤ k) for a standard bivariate normal pair with
/// correlation `r`. Infinite limits are accepted.
pub fn bvn_cdf(h: f64, k: f64, r: f64) -> f64 {
    debug_assert!((-1.0..=1.0).contains(&r), "correlation {r} out of range");
    // fixed argument order makes the result exactly symmetric
    let (h, k) = if h > k { (k, h) } else { (h, k) };
    if h == f64::NEG_INFINITY || k == f64::NEG_INFINITY {
        return 0.0;
    }
    if h == f64::INFINITY {
        return std_normal_cdf(k);
    }
    if k == f64::INFINITY {
        return std_normal_cdf(h);
    }
    if r == 0.0 {
        return std_normal_cdf(h) * std_normal_cdf(k);
    }
    if r >= 1.0 {
        return std_normal_cdf(h.min(k));
    }
    let lower = (std_normal_cdf(h) - std_normal_cdf(-k)).max(0.0);
    if r <= -1.0 {
        return lower;
    }
    if r < 0.0 {
        return (lower + from_lower_bound(h, k, r)).min(1.0);
    }
    upper_orthant(-h, -k, r)
}

/// Φ₂(h, k, r) − Φ₂(h, k, −1) for −1 < r < 0, as
/// (1/2π)∫₀^{φ_r} exp(−[(h+k)² − 4hk·sin²(φ/2)] / (2 sin²φ)) dφ
/// with φ_r = arccos(−r). This is the Drezner–Wesolowsky integral in the
/// angle φ = θ + π/2, written so that nothing cancels near r = −1.
fn from_lower_bound(h: f64, k: f64, r: f64) -> f64 {
    let (sum2, hk) = ((h + k) * (h + k), h * k);
    let f = |phi: f64| {
        let half = (phi / 2.0).sin();
        let s = phi.sin();
        (-(sum2 - 4.0 * hk * half * half) / (2.0 * s * s)).exp()
    };
    let upper = 2.0 * ((1.0 + r) / 2.0).sqrt().asin();
    adaptive_gauss_kronrod(f, 0.0, upper, 1e-15) / TWO_PI
}

const GK15_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK15_W: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// 7-point Gauss weights on the odd Kronrod nodes
const G7_W: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    let centre = f(mid);
    let (mut kronrod, mut gauss) = (GK15_W[7] * centre, G7_W[3] * centre);
    for i in 0..7 {
        let dx = half * GK15_X[i];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += GK15_W[i] * pair;
        if i % 2 == 1 {
            gauss += G7_W[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates a nonnegative `f` over [a, b], bisecting the interval with the
/// largest error estimate until the total estimate is below `rtol` times the
/// integral.
fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rtol: f64) -> f64 {
    let mut parts = vec![(a, b, gauss_kronrod_15(&f, a, b))];
    for _ in 0..200 {
        let total: f64 = parts.iter().map(|p| p.2 .0).sum();
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        if err <= rtol * total || total == 0.0 {
            break;
        }
        let worst = (0..parts.len())
            .max_by(|&i, &j| parts[i].2 .1.total_cmp(&parts[j].2 .1))
            .expect("nonempty");
        let (lo, hi, _) = parts.swap_remove(worst);
        let mid = (lo + hi) / 2.0;
        parts.push((lo, mid, gauss_kronrod_15(&f, lo, mid)));
        parts.push((mid, hi, gauss_kronrod_15(&f, mid, hi)));
    }
    parts.iter().map(|p| p.2 .0).sum()
}

/// P(X > h, Y > k) for 0 < r < 1, finite h and k.
fn upper_orthant(h: f64, k: f64, r: f64) -> f64 {
    let (xs, ws) = gauss_legendre(r);
    let hk = h * k;
    let mut bvn = 0.0;

    if r.abs() < 0.925 {
        let hs = (h * h + k * k) / 2.0;
        let asr = r.asin() / 2.0;
        for (&x, &w) in xs.iter().zip(ws) {
            for node in [1.0 - x, 1.0 + x] {
                let sn = (asr * node).sin();
                bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
            }
        }
        let v = bvn * asr / TWO_PI + std_normal_cdf(-h) * std_normal_cdf(-k);
        return v.clamp(0.0, 1.0);
    }

    let one_minus_r2 = (1.0 - r) * (1.0 + r);
    let mut a = one_minus_r2.sqrt();
    let bs = (h - k) * (h - k);
    let c = (4.0 - hk) / 8.0;
    let d = (12.0 - hk) / 80.0;
    let asr = -(bs / one_minus_r2 + hk) / 2.0;
    if asr > -100.0 {
        bvn = a
            * asr.exp()
            * (1.0 - c * (bs - one_minus_r2) * (1.0 - d * bs) / 3.0
                + c * d * one_minus_r2 * one_minus_r2);
    }
    if hk > -100.0 {
        let b = bs.sqrt();
        let sp = TWO_PI.sqrt() * std_normal_cdf(-b / a);
        bvn -= (-hk / 2.0).exp() * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
    }
    a /= 2.0;
    let mut sum = 0.0;
    for (&x, &w) in xs.iter().zip(ws) {
        for node in [1.0 - x, 1.0 + x] {
            let xs2 = (a * node) * (a * node);
            let asr = -(bs / xs2 + hk) / 2.0;
            if asr > -100.0 {
                let sp = 1.0 + c * xs2 * (1.0 + 5.0 * d * xs2);
                let rs = (1.0 - xs2).sqrt();
                let ep = (-(hk / 2.0) * xs2 / ((1.0 + rs) * (1.0 + rs))).exp() / rs;
                sum += w * asr.exp() * (sp - ep);
            }
        }
    }
    bvn = (a * sum - bvn) / TWO_PI;

    (bvn + std_normal_cdf(-h.max(k))).clamp(0.0, 1.0)
}

/// Lower and upper Fréchet bounds of Φ₂(a, b, ·).
pub fn frechet_bounds(a: f64, b: f64) -> (f64, f64) {
    let (pa, pb) = (std_normal_cdf(a), std_normal_cdf(b));
    ((pa + pb - 1.0).max(0.0), pa.min(pb))
}

const BOUND_TOL: f64 = 1e-13;
const WIDTH_TOL: f64 = 1e-12;

/// Solves Φ₂(a, b, r) = target for r ∈ [−1, 1].
///
/// Returns exactly ±1 when the target sits on a Fréchet bound. The iteration
/// is Brent's method on the bracket [−1, 1]; Φ₂ is strictly increasing in r
/// on the interior so the root is unique.
pub fn solve_bvn_correlation(a: f64, b: f64, target: f64) -> Result<f64> {
    let (lower, upper) = frechet_bounds(a, b);
    if !target.is_finite() || target < lower - BOUND_TOL || target > upper + BOUND_TOL {
        return Err(Error::FrechetBounds {
            target,
            lower,
            upper,
        });
    }
    if target <= lower {
        return Ok(-1.0);
    }
    if target >= upper {
        return Ok(1.0);
    }
    let indep = std_normal_cdf(a) * std_normal_cdf(b);
    if target == indep {
        return Ok(0.0);
    }
    Ok(brent(|r| bvn_cdf(a, b, r) - target, -1.0, 1.0))
}

/// Brent's root finder for a function with f(lo) ≤ 0 ≤ f(hi). Terminates on an
/// exact zero or a bracket narrower than `WIDTH_TOL`. There is no residual
/// test: in the tails ∂Φ₂/∂r can be below 1e-10, where a small residual says
/// little about the error in r.
fn brent<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * WIDTH_TOL;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return b;
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let rb = fb / fc;
                p = s * (2.0 * m * qa * (qa - rb) - (b - a) * (rb - 1.0));
                q = (qa - 1.0) * (rb - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagonal(r: f64) -> f64 {
        0.25 + r.asin() / TWO_PI
    }

    #[test]
    fn independence_and_diagonal_identity() {
        assert_eq!(bvn_cdf(0.0, 0.0, 0.0), 0.25);
        assert!((bvn_cdf(0.0, 0.0, 0.5) - 1.0 / 3.0).abs() <= 1e-12);
        for i in -99..=99 {
            let r = i as f64 / 100.0;
            assert!((bvn_cdf(0.0, 0.0, r) - diagonal(r)).abs() <= 1e-12, "r={r}");
        }
    }

    #[test]
    fn boundary_correlations() {
        for &(h, k) in &[(-1.0, 0.5), (2.0, 2.0), (0.3, -0.3), (-4.0, -6.0)] {
            assert_eq!(bvn_cdf(h, k, 1.0), std_normal_cdf(f64::min(h, k)));
            let lower = (std_normal_cdf(h) + std_normal_cdf(k) - 1.0).max(0.0);
            assert!((bvn_cdf(h, k, -1.0) - lower).abs() <= 1e-16);
            assert!((bvn_cdf(h, k, 0.0) - std_normal_cdf(h) * std_normal_cdf(k)).abs() <= 1e-16);
        }
    }

    #[test]
    fn infinite_limits() {
        assert_eq!(bvn_cdf(f64::NEG_INFINITY, 1.0, 0.3), 0.0);
        assert_eq!(bvn_cdf(0.4, f64::INFINITY, -0.3), std_normal_cdf(0.4));
        assert_eq!(bvn_cdf(f64::INFINITY, f64::INFINITY, 0.9), 1.0);
    }

    #[test]
    fn symmetric_in_arguments() {
        for &(h, k) in &[(-1.3, 0.2), (2.5, -0.7), (0.1, 0.9)] {
            for r in [-0.95, -0.5, 0.2, 0.8, 0.97] {
                assert!((bvn_cdf(h, k, r) - bvn_cdf(k, h, r)).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn solver_special_targets() {
        let (a, b) = (-1.2, 0.4);
        let indep = std_normal_cdf(a) * std_normal_cdf(b);
        assert_eq!(solve_bvn_correlation(a, b, indep).unwrap(), 0.0);
        assert!((solve_bvn_correlation(0.0, 0.0, 1.0 / 3.0).unwrap() - 0.5).abs() <= 1e-9);
        let (lo, hi) = frechet_bounds(a, b);
        assert_eq!(solve_bvn_correlation(a, b, hi).unwrap(), 1.0);
        assert_eq!(solve_bvn_correlation(a, b, lo).unwrap(), -1.0);
    }

    #[test]
    fn solver_rejects_targets_outside_bounds() {
        let (lo, hi) = frechet_bounds(0.3, -0.2);
        assert!(matches!(
            solve_bvn_correlation(0.3, -0.2, hi + 1e-9),
            Err(Error::FrechetBounds { .. })
        ));
        assert!(matches!(
            solve_bvn_correlation(0.3, -0.2, lo - 1e-9),
            Err(Error::FrechetBounds { .. })
        ));
        // within the 1e-13 slack the boundary is returned
        assert_eq!(solve_bvn_correlation(0.3, -0.2, hi + 1e-14).unwrap(), 1.0);
    }

    #[test]
    fn solver_residual() {
        // |r| = 0.99 is left out: for a ≠ b, Φ₂ there equals a Fréchet bound
        // to working precision
        for &(a, b) in &[(-1.75, -1.75), (-2.05, -0.47), (0.5, 1.5)] {
            for r in [-0.9, -0.3, 0.04, 0.25, 0.7, 0.9] {
                let t = bvn_cdf(a, b, r);
                let got = solve_bvn_correlation(a, b, t).unwrap();
                assert!((bvn_cdf(a, b, got) - t).abs() <= 1e-11);
                assert!((got - r).abs() <= 1e-8, "a={a} b={b} r={r}: {got}");
            }
        }
    }
}
