//! Reference implementations used as test oracles. None of these call into
//! the library's numerical kernels.
#![allow(dead_code)]

use std::f64::consts::PI;

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Φ from Marsaglia's series 1/2 + φ(x)·Σ x^{2k+1}/(1·3·…·(2k+1)) for
/// |x| < 1.5, and the Laplace continued fraction for the Mills ratio beyond.
/// The series cancels in the lower tail, hence the early switch.
pub fn normal_cdf(x: f64) -> f64 {
    if x.abs() < 1.5 {
        let (mut term, mut sum, mut k) = (x, x, 1.0);
        while term.abs() > 1e-18 * sum.abs() {
            term *= x * x / (2.0 * k + 1.0);
            sum += term;
            k += 1.0;
        }
        return 0.5 + normal_pdf(x) * sum;
    }
    let z = x.abs();
    // backward evaluation of z + 1/(z + 2/(z + 3/(z + …)))
    let mut cf = z;
    for k in (1..5000).rev() {
        cf = z + k as f64 / cf;
    }
    let tail = normal_pdf(z) / cf;
    if x < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_W: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G_W: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Recursive adaptive Gauss–Kronrod 7/15 to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (m, h) = ((a + b) / 2.0, (b - a) / 2.0);
        let fc = f(m);
        let (mut k, mut g) = (GK_W[7] * fc, G_W[3] * fc);
        for i in 0..7 {
            let s = f(m - h * GK_X[i]) + f(m + h * GK_X[i]);
            k += GK_W[i] * s;
            if i % 2 == 1 {
                g += G_W[i / 2] * s;
            }
        }
        if ((k - g) * h).abs() <= tol || depth == 0 {
            return k * h;
        }
        rec(f, a, m, tol / 2.0, depth - 1) + rec(f, m, b, tol / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    rec(f, a, b, tol, 40)
}

/// Φ₂(h, k, r) by two nested adaptive quadratures of the bivariate density,
/// for finite h, k and |r| < 1.
pub fn bvn_cdf_2d(h: f64, k: f64, r: f64) -> f64 {
    const CUT: f64 = 12.0;
    let s = (1.0 - r * r).sqrt();
    let outer = |x: f64| {
        let lo = r * x - CUT * s;
        if k <= lo {
            return 0.0;
        }
        let inner = |y: f64| {
            let z = (y - r * x) / s;
            normal_pdf(z) / s
        };
        normal_pdf(x) * integrate(&inner, lo, k, 1e-14)
    };
    // split the outer range where the inner upper limit starts to bind
    let x_star = if r != 0.0 {
        ((k + CUT * s) / r).clamp(-CUT, h.max(-CUT))
    } else {
        -CUT
    };
    let mut points = [-CUT, x_star, h.max(-CUT)];
    points.sort_by(f64::total_cmp);
    points
        .windows(2)
        .map(|w| integrate(&outer, w[0], w[1], 1e-13))
        .sum()
}

/// Nodes and weights of n-point Gauss–Legendre on [−1, 1] by Newton iteration
/// on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn factorial(n: u64) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn beta_pdf(d: u64, n: u64, x: f64) -> f64 {
    factorial(n + 1) / (factorial(d) * factorial(n - d))
        * x.powi(d as i32)
        * (1.0 - x).powi((n - d) as i32)
}

/// P(X₂ ≤ X₁) for X_i ~ Beta(d_i + 1, n_i − d_i + 1), as the double integral
/// ∫₀¹ f₁(x) ∫₀ˣ f₂(t) dt dx with Gauss–Legendre rules that are exact for
/// the polynomial integrands when n_i ≤ 12.
pub fn beta_exceed_2d(d1: u64, n1: u64, d2: u64, n2: u64) -> f64 {
    let rule = gauss_legendre(16);
    let on = |a: f64, b: f64, f: &dyn Fn(f64) -> f64| -> f64 {
        let (m, h) = ((a + b) / 2.0, (b - a) / 2.0);
        rule.iter().map(|&(x, w)| w * f(m + h * x)).sum::<f64>() * h
    };
    on(0.0, 1.0, &|x| {
        beta_pdf(d1, n1, x) * on(0.0, x, &|t| beta_pdf(d2, n2, t))
    })
}

fn sign(a: f64, b: f64) -> i64 {
    (a > b) as i64 - (a < b) as i64
}

/// Kendall's tau-b by enumeration of all pairs.
pub fn tau_b_brute(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let (mut s, mut tx, mut ty) = (0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (sign(x[i], x[j]), sign(y[i], y[j]));
            s += a * b;
            tx += (a == 0) as i64;
            ty += (b == 0) as i64;
        }
    }
    let pairs = (n * (n - 1) / 2) as i64;
    let (nx, ny) = (pairs - tx, pairs - ty);
    if nx == 0 || ny == 0 {
        return None;
    }
    Some(s as f64 / ((nx as f64) * (ny as f64)).sqrt())
}

/// Spearman's rho in sign-sum form: with a_t = Σ_{s≠t} sign(x_t − x_s) and
/// b_t likewise, ρ = Σ a_t b_t / √(Σ a_t² · Σ b_t²).
pub fn spearman_sign_sum(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let row = |v: &[f64], t: usize| (0..n).map(|s| sign(v[t], v[s])).sum::<i64>();
    let (mut ab, mut aa, mut bb) = (0i64, 0i64, 0i64);
    for t in 0..n {
        let (a, b) = (row(x, t), row(y, t));
        ab += a * b;
        aa += a * a;
        bb += b * b;
    }
    if aa == 0 || bb == 0 {
        return None;
    }
    Some(ab as f64 / ((aa as f64) * (bb as f64)).sqrt())
}

/// Rank form 1 − 6Σd²/(T(T²−1)) for tie-free data.
pub fn spearman_rank_form(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let rank = |v: &[f64], t: usize| (0..n).filter(|&s| v[s] < v[t]).count() as i64;
    let d2: i64 = (0..n).map(|t| (rank(x, t) - rank(y, t)).pow(2)).sum();
    let n = n as i64;
    let denom = n * (n * n - 1);
    (denom - 6 * d2) as f64 / denom as f64
}
