use std::f64::consts::PI;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Below this argument the Stirling series is reached by shifting upward.
const STIRLING_MIN: f64 = 15.0;

// B_{2k} / (2k (2k-1)) for k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn stirling_tail(x: f64) -> f64 {
    let r = 1.0 / (x * x);
    let mut acc = 0.0;
    for c in STIRLING.iter().rev() {
        acc = acc * r + c;
    }
    acc / x
}

/// sin(pi x) with the argument reduced before multiplying by pi.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let mut r = x - 2.0 * (x / 2.0).round();
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    (PI * r).sin()
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// The gamma function for real arguments.
///
/// Overflows to `+inf` above x ≈ 171.6. Non-positive integers are poles.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("gamma of NaN"));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::domain(format!("gamma has a pole at {x}")));
    }
    if x < 0.5 {
        let g = gamma(1.0 - x)?;
        return Ok(PI / (sin_pi(x) * g));
    }
    if x > 171.7 {
        return Ok(f64::INFINITY);
    }
    let mut shift = 1.0;
    let mut y = x;
    while y < STIRLING_MIN {
        shift *= y;
        y += 1.0;
    }
    // split the power so that y^(y-1/2) e^-y does not overflow early
    let half = y.powf(0.5 * (y - 0.5));
    let g = SQRT_2PI * (half * (-y).exp()) * half * stirling_tail(y).exp();
    Ok(g / shift)
}

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < STIRLING_MIN {
        return Ok(gamma(x)?.ln());
    }
    Ok((x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_tail(x))
}

/// n!! with the conventions (-1)!! = 0!! = 1.
///
/// Panics for n < -1 or when the result exceeds `u128`.
pub fn double_factorial(n: i64) -> u128 {
    assert!(n >= -1, "double factorial undefined for {n}");
    let mut acc: u128 = 1;
    let mut k = n;
    while k > 1 {
        acc = acc
            .checked_mul(k as u128)
            .unwrap_or_else(|| panic!("{n}!! overflows u128"));
        k -= 2;
    }
    acc
}

/// n!! as a float, valid far beyond the integer range.
pub fn double_factorial_f64(n: i64) -> f64 {
    assert!(n >= -1, "double factorial undefined for {n}");
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

/// Taylor coefficients of 1/Γ(z) about z = 0, index k multiplies z^k.
pub(crate) const RECIP_GAMMA_TAYLOR: [f64; 25] = [
    0.0,
    1.0,
    0.577_215_664_901_532_860_6,
    -0.655_878_071_520_253_881_1,
    -0.042_002_635_034_095_235_53,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_75,
    -0.009_621_971_527_876_973_562,
    0.007_218_943_246_663_099_542,
    -0.001_165_167_591_859_065_112,
    -0.000_215_241_674_114_950_972_8,
    0.000_128_050_282_388_116_186_2,
    -0.000_020_134_854_780_788_238_66,
    -0.000_001_250_493_482_142_670_657,
    0.000_001_133_027_231_981_695_882,
    -2.056_338_416_977_607_103e-7,
    6.116_095_104_481_415_818e-9,
    5.002_007_644_469_222_930e-9,
    -1.181_274_570_487_020_145e-9,
    1.043_426_711_691_100_510e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783e-14,
    -5.348_122_539_423_017_982e-15,
];

/// Temme's auxiliary functions for |mu| <= 1/2:
/// gam1 = (1/Γ(1-mu) - 1/Γ(1+mu)) / (2 mu), gam2 = (1/Γ(1-mu) + 1/Γ(1+mu)) / 2,
/// together with 1/Γ(1+mu) and 1/Γ(1-mu).
pub(crate) fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let c = &RECIP_GAMMA_TAYLOR;
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    // even k feed gam1 with mu^(k-2), odd k feed gam2 with mu^(k-1)
    let m2 = mu * mu;
    let mut p = 1.0;
    let mut k = 2;
    while k < c.len() {
        gam1 -= c[k] * p;
        p *= m2;
        k += 2;
    }
    p = 1.0;
    k = 1;
    while k < c.len() {
        gam2 += c[k] * p;
        p *= m2;
        k += 2;
    }
    let gampl = gam2 - mu * gam1;
    let gammi = gam2 + mu * gam1;
    (gam1, gam2, gampl, gammi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_small_identities() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert!(rel(gamma(0.5).unwrap(), PI.sqrt()) < 1e-15);
        assert!(rel(gamma(5.0).unwrap(), 24.0) < 1e-15);
    }

    #[test]
    fn gamma_reference_values() {
        let cases = [
            (0.25, 3.625_609_908_221_908_311_9),
            (0.75, 1.225_416_702_465_177_645_1),
            (0.1, 9.513_507_698_668_731_285_8),
            (2.5, 1.329_340_388_179_137_020_5),
            (7.3, 1_271.423_633_663_908_839_9),
            (17.5, 85_634_974_475_162.063_871),
            (-0.5, -3.544_907_701_811_032_054_6),
            (-2.5, -0.945_308_720_482_941_881_2),
            (33.3, 7.487_577_596_522_632_327_4e35),
            (170.2, 1.191_841_116_636_669_594_6e305),
        ];
        for (x, want) in cases {
            let got = gamma(x).unwrap();
            assert!(rel(got, want) < 1e-13, "gamma({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn ln_gamma_reference_values() {
        let cases = [
            (0.1, 2.252_712_651_734_205_902),
            (2.5, 0.284_682_870_472_919_159_6),
            (100.0, 359.134_205_369_575_398_78),
            (1e5, 1_051_287.708_973_656_894_9),
        ];
        for (x, want) in cases {
            let got = ln_gamma(x).unwrap();
            assert!(rel(got, want) < 1e-13, "ln_gamma({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn gamma_poles_are_domain_errors() {
        for x in [0.0, -1.0, -7.0] {
            assert!(matches!(gamma(x), Err(Error::Domain(_))));
        }
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(-1), 1);
        assert_eq!(double_factorial(0), 1);
        assert_eq!(double_factorial(5), 15);
        assert_eq!(double_factorial(7), 105);
        assert_eq!(double_factorial(31), 191_898_783_962_510_625);
        assert!((double_factorial_f64(31) / 191_898_783_962_510_625.0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn temme_gammas_match_direct_gamma() {
        for mu in [-0.5, -0.25, -1e-3, 0.0, 0.1, 0.25, 0.5] {
            let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
            let rp = 1.0 / gamma(1.0 + mu).unwrap();
            let rm = 1.0 / gamma(1.0 - mu).unwrap();
            assert!((gampl - rp).abs() < 1e-15, "mu={mu}");
            assert!((gammi - rm).abs() < 1e-15, "mu={mu}");
            assert!((gam2 - 0.5 * (rp + rm)).abs() < 1e-15);
            if mu.abs() > 0.05 {
                assert!((gam1 - (rm - rp) / (2.0 * mu)).abs() < 1e-13);
            }
        }
    }
}
