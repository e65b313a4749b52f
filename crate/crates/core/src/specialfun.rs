//! Gamma, log-gamma and digamma for positive real arguments.
//!
//! Every kernel formula in this crate evaluates `Γ` at `s(r)` and `n/2 − s(r)`,
//! both strictly positive for an admissible profile, so only the positive
//! axis is supported. Gamma uses a 14-term Lanczos sum (`g = 671/128`);
//! digamma shifts its argument above 10 by recurrence and then sums the
//! Stirling-type asymptotic series.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Largest argument whose gamma value is representable as `f64`.
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

/// Accuracy contract of the special functions.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpecialFunPrecision {
    target_rel_error: f64,
}

impl SpecialFunPrecision {
    /// The accuracy the implementation is built and tested for.
    pub const ACHIEVED: f64 = 1e-14;

    pub fn new(target_rel_error: f64) -> Result<Self> {
        if !(target_rel_error > 0.0 && target_rel_error <= 1e-10) {
            return Err(Error::domain(
                "SpecialFunPrecision::new",
                target_rel_error,
                "0 < target <= 1e-10",
            ));
        }
        Ok(Self { target_rel_error })
    }

    pub fn target_rel_error(&self) -> f64 {
        self.target_rel_error
    }

    /// Whether the implementation meets this target.
    pub fn is_met(&self) -> bool {
        self.target_rel_error >= Self::ACHIEVED
    }
}

impl Default for SpecialFunPrecision {
    fn default() -> Self {
        Self {
            target_rel_error: Self::ACHIEVED,
        }
    }
}

const LANCZOS_G_HALF: f64 = 5.242_187_5; // 671/128 + 1/2
const LANCZOS_C0: f64 = 0.999_999_999_999_997_092;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

fn lanczos_series(x: f64) -> f64 {
    let mut y = x;
    let mut ser = LANCZOS_C0;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    ser
}

/// Euler's gamma function for `z > 0`.
pub fn gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || z.is_infinite() {
        return Err(Error::domain("gamma", z, "z > 0"));
    }
    if z > GAMMA_MAX_ARG {
        return Err(Error::Overflow {
            function: "gamma",
            value: z,
        });
    }
    let value = if z.fract() == 0.0 {
        // Exact for integers: (z − 1)!
        (2..z as u32).map(f64::from).product()
    } else if z < 1.0 {
        gamma_ge1(z + 1.0) / z
    } else {
        gamma_ge1(z)
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow {
            function: "gamma",
            value: z,
        })
    }
}

fn gamma_ge1(x: f64) -> f64 {
    let t = x + LANCZOS_G_HALF;
    // t^(x+1/2) e^(−t) is split in two halves so that neither overflows.
    let half = t.powf(0.5 * (x + 0.5)) * (-0.5 * t).exp();
    half * (half * (SQRT_2PI * lanczos_series(x) / x))
}

/// Natural logarithm of `Γ(z)` for `z > 0`.
pub fn ln_gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || z.is_infinite() {
        return Err(Error::domain("ln_gamma", z, "z > 0"));
    }
    Ok(ln_gamma_unchecked(z))
}

pub(crate) fn ln_gamma_unchecked(z: f64) -> f64 {
    if z < 1.0 {
        return ln_gamma_ge1(z + 1.0) - z.ln();
    }
    ln_gamma_ge1(z)
}

fn ln_gamma_ge1(x: f64) -> f64 {
    let t = x + LANCZOS_G_HALF;
    (x + 0.5) * t.ln() - t + (SQRT_2PI * lanczos_series(x) / x).ln()
}

/// Digamma `ψ(z) = d/dz ln Γ(z)` for `z > 0`.
pub fn digamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || z.is_infinite() {
        return Err(Error::domain("digamma", z, "z > 0"));
    }
    Ok(digamma_unchecked(z))
}

pub(crate) fn digamma_unchecked(z: f64) -> f64 {
    let mut x = z;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Bernoulli terms B_2k / (2k x^2k), k = 1..7
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    acc + x.ln() - 0.5 * inv - series
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_reference_values() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert!(rel(gamma(0.5).unwrap(), core::f64::consts::PI.sqrt()) < 1e-15);
        // mpmath, 30 digits
        let cases = [
            (0.75, 1.225_416_702_465_177_645_129),
            (0.1, 9.513_507_698_668_731_285_808),
            (4.5, 11.631_728_396_567_448_929_14),
            (30.2, 1.741_009_444_591_131_190_914e31),
        ];
        for (z, expected) in cases {
            assert!(rel(gamma(z).unwrap(), expected) < 1e-14, "gamma({z})");
        }
        assert!((ln_gamma(100.5).unwrap() - 361.435_540_467_777_621_555).abs() < 1e-12);
    }

    #[test]
    fn gamma_domain_and_overflow() {
        assert!(matches!(gamma(0.0), Err(Error::Domain { .. })));
        assert!(matches!(gamma(-1.5), Err(Error::Domain { .. })));
        assert!(matches!(gamma(f64::NAN), Err(Error::Domain { .. })));
        assert!(matches!(gamma(172.0), Err(Error::Overflow { .. })));
        assert!(gamma(171.0).unwrap().is_finite());
        assert!(matches!(ln_gamma(0.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn digamma_reference_values() {
        assert!(rel(digamma(1.0).unwrap(), -EULER_GAMMA) < 1e-14);
        let half = -EULER_GAMMA - 2.0 * core::f64::consts::LN_2;
        assert!(rel(digamma(0.5).unwrap(), half) < 1e-14);
        // mpmath, 30 digits
        let cases = [
            (0.9, -0.754_926_949_947_051_349_197),
            (2.5, 0.703_156_640_645_243_187_226),
            (7.3, 1.917_820_335_637_986_072_291),
            (0.01, -100.560_885_457_868_672_415),
        ];
        for (z, expected) in cases {
            assert!(rel(digamma(z).unwrap(), expected) < 1e-12, "digamma({z})");
        }
        assert!(matches!(digamma(0.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn digamma_strictly_increasing() {
        let grid = crate::log_grid(1e-3, 50.0, 1000);
        let values: alloc::vec::Vec<f64> = grid.iter().map(|&z| digamma(z).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn digamma_matches_log_gamma_difference() {
        let h = 1e-6;
        for z in crate::linear_grid(0.3, 3.0, 55) {
            let fd = (ln_gamma(z + h).unwrap() - ln_gamma(z - h).unwrap()) / (2.0 * h);
            assert!((digamma(z).unwrap() - fd).abs() < 1e-6, "z = {z}");
        }
    }

    #[test]
    fn precision_contract() {
        assert!(SpecialFunPrecision::default().is_met());
        assert!(SpecialFunPrecision::new(1e-9).is_err());
        assert!(SpecialFunPrecision::new(0.0).is_err());
        assert!(!SpecialFunPrecision::new(1e-16).unwrap().is_met());
    }

    proptest! {
        #[test]
        fn gamma_recurrence(log_z in (1e-3f64).ln()..(50.0f64).ln()) {
            let z = log_z.exp();
            let lhs = gamma(z + 1.0).unwrap();
            let rhs = z * gamma(z).unwrap();
            prop_assert!(rel(lhs, rhs) < 1e-13);
        }
    }
}
