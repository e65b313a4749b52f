//! The variable-order Riesz kernel, `p(r) = r K(r)` and the Green's function.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::exponent::ExponentProfile;
use crate::specialfun::{digamma_unchecked, gamma, ln_gamma_unchecked};

const LN_4: f64 = 2.0 * core::f64::consts::LN_2;
const LN_PI: f64 = 1.144_729_885_849_400_2;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelEvaluation {
    pub r: f64,
    pub k_value: f64,
    /// `r · k_value`.
    pub p_value: f64,
    pub s_local: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GreenFunctionSample {
    pub r: f64,
    /// `Φ(r) = −K(r)`, always negative.
    pub phi_value: f64,
}

/// `ln K_s(r)` in dimension `n`, assuming `0 < s < n/2` and `r > 0`.
#[inline]
pub(crate) fn ln_kernel(s: f64, half_n: f64, r: f64) -> f64 {
    ln_gamma_unchecked(half_n - s) - ln_gamma_unchecked(s) - s * LN_4 - half_n * LN_PI + (2.0 * s - 2.0 * half_n) * r.ln()
}

/// `K(r)` without argument checks; the caller guarantees `r > 0`.
#[inline]
pub(crate) fn kernel_unchecked(profile: &ExponentProfile, r: f64) -> f64 {
    ln_kernel(profile.order_at(r), profile.half_dimension(), r).exp()
}

/// `p(r) = r K(r)` without argument checks.
#[inline]
pub(crate) fn p_unchecked(profile: &ExponentProfile, r: f64) -> f64 {
    r * kernel_unchecked(profile, r)
}

fn check_radius(function: &'static str, r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(function, r, "0 < r < inf"))
    }
}

/// `K(r) = Γ(n/2 − s(r)) / (4^s(r) π^(n/2) Γ(s(r))) · r^(2s(r) − n)`.
///
/// Evaluated in logarithmic form so that extreme radii neither overflow nor
/// underflow prematurely.
pub fn kernel_eval(profile: &ExponentProfile, r: f64) -> Result<KernelEvaluation> {
    check_radius("kernel_eval", r)?;
    let s = profile.eval(r)?;
    let half_n = profile.half_dimension();
    if !(s > 0.0 && s < half_n) {
        return Err(Error::domain("kernel_eval", s, "0 < s(r) < n/2"));
    }
    let k_value = ln_kernel(s, half_n, r).exp();
    if !k_value.is_finite() {
        return Err(Error::Overflow {
            function: "kernel_eval",
            value: r,
        });
    }
    Ok(KernelEvaluation {
        r,
        k_value,
        p_value: r * k_value,
        s_local: s,
    })
}

/// Constant-order kernel `K_s(r)` in dimension `n`.
pub fn kernel_constant_order(s: f64, n: u32, r: f64) -> Result<f64> {
    check_radius("kernel_constant_order", r)?;
    if n == 0 {
        return Err(Error::Dimension(n));
    }
    let half_n = 0.5 * n as f64;
    if !(s > 0.0 && s < half_n) {
        return Err(Error::domain("kernel_constant_order", s, "0 < s < n/2"));
    }
    Ok(ln_kernel(s, half_n, r).exp())
}

/// Green's function `Φ(r) = −K(r)`.
pub fn green_function(profile: &ExponentProfile, r: f64) -> Result<GreenFunctionSample> {
    let k = kernel_eval(profile, r)?;
    Ok(GreenFunctionSample { r, phi_value: -k.k_value })
}

/// `p′(r)` by a fourth-order centred difference with step `10⁻³ r`.
pub fn p_derivative_numeric(profile: &ExponentProfile, r: f64) -> Result<f64> {
    check_radius("p_derivative_numeric", r)?;
    let h = 1e-3 * r;
    let p = |x: f64| kernel_eval(profile, x).map(|e| e.p_value);
    Ok((8.0 * (p(r + h)? - p(r - h)?) - (p(r + 2.0 * h)? - p(r - 2.0 * h)?)) / (12.0 * h))
}

/// Closed-form `p′(r)` for `s(r) = (6 + 9r)/(10(1 + r))`, `n = 3`:
///
/// ```text
/// p′(r) = −K(r) / (10 (1+r)²) · { 2r(r + 5 + ln 8) − 6 r ln r + 8
///          + 3r [ψ((9r+6)/(10(r+1))) + ψ(3/10 · (2 + 1/(r+1)))] }
/// ```
pub fn p_derivative_example1(r: f64) -> Result<f64> {
    check_radius("p_derivative_example1", r)?;
    let k = kernel_eval(&crate::exponent::make_example1(), r)?.k_value;
    let psi1 = digamma_unchecked((9.0 * r + 6.0) / (10.0 * (r + 1.0)));
    let psi2 = digamma_unchecked(0.3 * (2.0 + 1.0 / (r + 1.0)));
    let braces = 2.0 * r * (r + 5.0 + 8f64.ln()) - 6.0 * r * r.ln() + 8.0 + 3.0 * r * (psi1 + psi2);
    Ok(-k / (10.0 * (1.0 + r) * (1.0 + r)) * braces)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AsymptoticRegime {
    NearZero,
    NearInfinity,
}

/// Leading coefficient `c₀ = Γ(9/10) / (2^(6/5) π^(3/2) Γ(3/5))` of
/// `p(r) ~ c₀ r^(−4/5)` for Example 1.
pub fn example1_leading_coefficient() -> f64 {
    gamma(0.9).unwrap_or(f64::NAN) / (2f64.powf(1.2) * PI.powf(1.5) * gamma(0.6).unwrap_or(f64::NAN))
}

/// Asymptotic expansions of `p(r)` for Example 1.
///
/// Near zero the two-term expansion
/// `c₀ r^(−4/5) − (3 c₀ / 10) r^(1/5) [−2 ln r + ln 4 + ψ(3/5) + ψ(9/10)]`
/// is returned; near infinity the leading term
/// `Γ(3/5) / (2^(9/5) π^(3/2) Γ(9/10)) r^(−1/5)`.
pub fn p_asymptotics_example1(r: f64, regime: AsymptoticRegime) -> Result<f64> {
    check_radius("p_asymptotics_example1", r)?;
    let g06 = gamma(0.6)?;
    let g09 = gamma(0.9)?;
    Ok(match regime {
        AsymptoticRegime::NearZero => {
            let c0 = g09 / (2f64.powf(1.2) * PI.powf(1.5) * g06);
            let bracket = -2.0 * r.ln() + LN_4 + digamma_unchecked(0.6) + digamma_unchecked(0.9);
            c0 * r.powf(-0.8) - 0.3 * c0 * r.powf(0.2) * bracket
        }
        AsymptoticRegime::NearInfinity => g06 / (2f64.powf(1.8) * PI.powf(1.5) * g09) * r.powf(-0.2),
    })
}
