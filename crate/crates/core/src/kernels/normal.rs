//! Univariate standard normal density, distribution function and quantile.
//!
//! The distribution function uses Cody's rational Chebyshev approximations
//! for erf/erfc in three ranges, with the exponential split into two factors
//! so the upper range keeps full relative accuracy deep into the tail. The
//! quantile is Wichura's AS 241 (PPND16) followed by one Halley step against
//! the distribution function above.

use crate::error::{Error, Result};

pub(crate) const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_939_946_059_934;
const SQRT_32: f64 = 5.656_854_249_492_380_195_206_754_896_838;

const A: [f64; 5] = [
    2.235_252_035_460_683_928_7,
    161.028_231_068_555_878_81,
    1_067.689_485_460_370_958_2,
    18_154.981_253_343_561_249,
    0.065_682_337_918_207_449_113,
];
const B: [f64; 4] = [
    47.202_581_904_688_241_87,
    976.098_551_737_776_693_22,
    10_260.932_208_618_978_205,
    45_507.789_335_026_729_956,
];
const C: [f64; 9] = [
    0.398_941_512_088_134_667_64,
    8.883_149_794_388_375_941_2,
    93.506_656_132_177_855_979,
    597.270_276_394_800_262_26,
    2_494.537_585_290_372_671_1,
    6_848.190_450_536_282_332_6,
    11_602.651_437_647_350_124,
    9_842.714_838_383_978_021_8,
    1.076_557_677_372_019_231_7e-8,
];
const D: [f64; 8] = [
    22.266_688_044_328_115_691,
    235.387_901_782_624_998_61,
    1_519.377_599_407_554_805,
    6_485.558_298_266_760_755,
    18_615.571_640_885_098_091,
    34_900.952_721_145_977_266,
    38_912.003_286_093_271_411,
    19_685.429_676_859_990_727,
];
const P: [f64; 6] = [
    0.215_898_534_057_956_99,
    0.127_401_161_160_247_363_9,
    0.022_235_277_870_649_807,
    0.001_421_619_193_227_893_466,
    2.911_287_495_116_879_2e-5,
    0.023_073_441_764_940_173_03,
];
const Q: [f64; 5] = [
    1.284_260_096_144_911_21,
    0.468_238_212_480_865_118,
    0.065_988_137_868_928_551_5,
    0.003_782_396_332_027_582_44,
    7.297_515_550_839_662_05e-5,
];

/// Standard normal density φ(x).
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Returns `(Φ(x), 1 − Φ(x))`, each with full relative accuracy.
pub fn std_normal_cdf_both(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    let y = x.abs();
    if y <= 0.674_489_75 {
        let (mut num, mut den) = (0.0, 0.0);
        if y > f64::EPSILON * 0.5 {
            let xsq = x * x;
            num = A[4] * xsq;
            den = xsq;
            for i in 0..3 {
                num = (num + A[i]) * xsq;
                den = (den + B[i]) * xsq;
            }
        }
        let t = x * (num + A[3]) / (den + B[3]);
        return (0.5 + t, 0.5 - t);
    }

    let tail = if y <= SQRT_32 {
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        scaled_exp(y) * (num + C[7]) / (den + D[7])
    } else if y.is_finite() {
        let xsq = 1.0 / (x * x);
        let mut num = P[5] * xsq;
        let mut den = xsq;
        for i in 0..4 {
            num = (num + P[i]) * xsq;
            den = (den + Q[i]) * xsq;
        }
        let t = xsq * (num + P[4]) / (den + Q[4]);
        scaled_exp(y) * (FRAC_1_SQRT_2PI - t) / y
    } else {
        0.0
    };
    if x > 0.0 {
        (1.0 - tail, tail)
    } else {
        (tail, 1.0 - tail)
    }
}

// exp(-y²/2) evaluated as exp(-s²/2)·exp(-(y-s)(y+s)/2) with s = y rounded to 1/16,
// which avoids the cancellation in y² for large y.
fn scaled_exp(y: f64) -> f64 {
    let s = (y * 16.0).trunc() / 16.0;
    let del = (y - s) * (y + s);
    (-s * s * 0.5).exp() * (-del * 0.5).exp()
}

/// Standard normal distribution function Φ(x).
pub fn std_normal_cdf(x: f64) -> f64 {
    std_normal_cdf_both(x).0
}

/// Standard normal quantile Φ⁻¹(p) for `0 < p < 1`.
pub fn std_normal_inv_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityDomain(p));
    }
    if p > 0.5 {
        // 1 - p is exact here.
        Ok(-lower_quantile(1.0 - p))
    } else {
        Ok(lower_quantile(p))
    }
}

/// Quantile for p in (0, 0.5], refined in the lower tail where Φ has full
/// relative precision.
fn lower_quantile(p: f64) -> f64 {
    let mut x = ppnd16(p);
    if x == 0.0 {
        return x;
    }
    let e = std_normal_cdf(x) - p;
    let u = e / std_normal_pdf(x);
    if u.is_finite() {
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

// AS 241 coefficients, ascending powers.
const CENTRAL_NUM: [f64; 8] = [
    3.387_132_872_796_366_608,
    133.141_667_891_784_377_45,
    1_971.590_950_306_551_442_7,
    13_731.693_765_509_461_125,
    45_921.953_931_549_871_457,
    67_265.770_927_008_700_853,
    33_430.575_583_588_128_105,
    2_509.080_928_730_122_672_7,
];
const CENTRAL_DEN: [f64; 8] = [
    1.0,
    42.313_330_701_600_911_252,
    687.187_007_492_057_908_3,
    5_394.196_021_424_751_107_7,
    21_213.794_301_586_595_867,
    39_307.895_800_092_710_61,
    28_729.085_735_721_942_674,
    5_226.495_278_852_545_925,
];
const NEAR_NUM: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_9,
    5.769_497_221_460_691_405_5,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    0.241_780_725_177_450_611_77,
    0.022_723_844_989_269_184_583_3,
    7.745_450_142_783_414_076_4e-4,
];
const NEAR_DEN: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_4,
    0.689_767_334_985_100_004_55,
    0.148_103_976_427_480_074_59,
    0.015_198_666_563_616_457_196_6,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
const FAR_NUM: [f64; 8] = [
    6.657_904_643_501_103_777_2,
    5.463_784_911_164_114_369_9,
    1.784_826_539_917_291_335_8,
    0.296_560_571_828_504_891_23,
    0.026_532_189_526_576_123_093,
    0.001_242_660_947_388_078_438_6,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const FAR_DEN: [f64; 8] = [
    1.0,
    0.599_832_206_555_887_937_69,
    0.136_929_880_922_735_805_31,
    0.014_875_361_290_850_614_852_5,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

fn horner(r: f64, c: &[f64; 8]) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * r + k)
}

/// Wichura (1988), algorithm AS 241, double precision variant.
fn ppnd16(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * horner(r, &CENTRAL_NUM) / horner(r, &CENTRAL_DEN);
    }

    let tail = if q < 0.0 { p } else { 1.0 - p };
    let r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        let r = r - 1.6;
        horner(r, &NEAR_NUM) / horner(r, &NEAR_DEN)
    } else {
        let r = r - 5.0;
        horner(r, &FAR_NUM) / horner(r, &FAR_DEN)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn pdf_reference_values() {
        // mpmath, 40 digits
        assert!(rel(std_normal_pdf(0.0), 0.398_942_280_401_432_7) <= 1e-14);
        assert!(rel(std_normal_pdf(1.0), 0.241_970_724_519_143_37) <= 1e-14);
        for x in [0.1, 0.7, 2.5, 9.0] {
            assert_eq!(std_normal_pdf(x), std_normal_pdf(-x));
        }
    }

    #[test]
    fn cdf_reference_values() {
        // mpmath ncdf, 20 significant digits
        let cases = [
            (-37.0, 5.725_571_222_524_576_8e-300),
            (-20.0, 2.753_624_118_606_233_7e-89),
            (-8.0, 6.220_960_574_271_784_1e-16),
            (-5.5, 1.898_956_246_588_771_9e-8),
            (-3.0, 0.001_349_898_031_630_094_5),
            (-1.368, 0.085_656_038_053_781_737),
            (-1.0, 0.158_655_253_931_457_05),
            (-0.5, 0.308_537_538_725_986_9),
            (0.3, 0.617_911_422_188_952_64),
            (0.67, 0.748_571_104_904_689_9),
            (2.0, 0.977_249_868_051_820_8),
            (4.0, 0.999_968_328_758_166_9),
            (7.0, 0.999_999_999_998_720_2),
        ];
        for (x, want) in cases {
            let got = std_normal_cdf(x);
            assert!((got - want).abs() <= 1e-15, "x={x}: {got} vs {want}");
            if x < -3.0 {
                assert!(rel(got, want) <= 1e-13, "relative tail accuracy at {x}");
            }
        }
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert_eq!(std_normal_cdf(40.0), 1.0);
        assert_eq!(std_normal_cdf(f64::NEG_INFINITY), 0.0);
        assert_eq!(std_normal_cdf(f64::INFINITY), 1.0);
    }

    #[test]
    fn cdf_is_monotone_on_fine_grid() {
        let mut prev = 0.0;
        for i in -40_000..=40_000 {
            let v = std_normal_cdf(i as f64 * 1e-3);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn inv_cdf_reference_values() {
        let cases = [
            (1e-300, -37.047_096_299_361_199),
            (1e-100, -21.273_453_560_965_324),
            (1e-20, -9.262_340_089_798_408),
            (1e-8, -5.612_001_244_174_789),
            (0.001, -3.090_232_306_167_813_5),
            (0.02, -2.053_748_910_631_823),
            (0.3, -0.524_400_512_708_040_8),
            (0.9, 1.281_551_565_544_600_5),
            (0.975, 1.959_963_984_540_054_2),
            (0.999_999, 4.753_424_308_817_088),
        ];
        for (p, want) in cases {
            let got = std_normal_inv_cdf(p).unwrap();
            assert!(rel(got, want) <= 1e-14, "p={p}: {got} vs {want}");
        }
        assert_eq!(std_normal_inv_cdf(0.5).unwrap(), 0.0);
    }

    #[test]
    fn inv_cdf_rejects_boundaries() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(
                std_normal_inv_cdf(p),
                Err(Error::ProbabilityDomain(_))
            ));
        }
    }

    #[test]
    fn inv_cdf_residual_and_monotonicity() {
        let mut prev = f64::NEG_INFINITY;
        for i in 1..100_000 {
            let p = i as f64 / 100_000.0;
            let x = std_normal_inv_cdf(p).unwrap();
            assert!((std_normal_cdf(x) - p).abs() <= 1e-13);
            assert!(x > prev, "not increasing at p={p}");
            prev = x;
        }
    }

    #[test]
    fn roundtrip_on_minus_six_to_six() {
        for i in -600..=600 {
            let x = i as f64 / 100.0;
            let back = std_normal_inv_cdf(std_normal_cdf(x)).unwrap();
            // Above x ≈ 5.6 the spacing of doubles near 1, divided by φ(x),
            // exceeds 1e-9: even the exact inverse of the rounded Φ(x) misses.
            let resolution = f64::EPSILON / 2.0 / std_normal_pdf(x);
            assert!(
                (back - x).abs() <= 1e-9_f64.max(2.0 * resolution),
                "x={x}: {back}"
            );
            if x <= 5.5 {
                assert!((back - x).abs() <= 1e-9, "x={x}: {back}");
            }
        }
    }
}
