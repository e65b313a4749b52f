//! The three-dimensional radial Fourier transform of the kernel,
//!
//! ```text
//! K̂(k) = (4π/k) ∫₀^∞ p(r) sin(kr) dr,    p(r) = r K(r).
//! ```
//!
//! When `p(r) ~ r^a` with `a = 1 − n + 2 s(∞) < 0` the integral converges
//! conditionally and is summed directly. Otherwise it only exists as the
//! Abel limit `λ → 0⁺` of the damped integrals with `e^{−λr}` in the
//! integrand; those are computed for a sequence of `λ` and extrapolated.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::accel::{richardson_to_zero, RichardsonResult};
use crate::error::{Error, Result};
use crate::exponent::ExponentProfile;
use crate::kernel::{kernel_unchecked, p_unchecked};
use crate::oscillatory::{period_midpoint, sine_integral, PeriodContribution, SineIntegralOptions};
use crate::quadrature::{integrate, integrate_graded_to_origin, QuadratureOptions};
use crate::spectral::SpectralTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Extrapolation {
    /// Report the value at the smallest `λ`.
    None,
    /// Polynomial extrapolation of the `λ`-sequence to `λ = 0`.
    Richardson,
}

/// How the entries of `lambda_sequence` are turned into damping rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LambdaScaling {
    /// Damping rate `λ`.
    Absolute,
    /// Damping rate `λ·k`. The damped transform is analytic in `λ` on a
    /// disc of radius `k`, so this keeps the extrapolation equally accurate
    /// at every wavenumber.
    RelativeToK,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegularizationPolicy {
    pub lambda_sequence: Vec<f64>,
    pub extrapolation: Extrapolation,
    pub lambda_scaling: LambdaScaling,
    /// Maximum number of periods `2π/k` summed per integral.
    pub period_budget: usize,
    /// Relative tolerance on the summed tail.
    pub tail_tolerance: f64,
    /// Keep the per-period contributions of the last integral.
    pub record_trace: bool,
}

impl Default for RegularizationPolicy {
    fn default() -> Self {
        Self {
            lambda_sequence: alloc::vec![0.2, 0.1, 0.05, 0.025],
            extrapolation: Extrapolation::Richardson,
            lambda_scaling: LambdaScaling::Absolute,
            period_budget: 100_000,
            tail_tolerance: 1e-8,
            record_trace: false,
        }
    }
}

impl RegularizationPolicy {
    pub fn with_lambdas(mut self, lambdas: Vec<f64>) -> Self {
        self.lambda_sequence = lambdas;
        self
    }

    pub fn with_extrapolation(mut self, extrapolation: Extrapolation) -> Self {
        self.extrapolation = extrapolation;
        self
    }

    pub fn with_scaling(mut self, scaling: LambdaScaling) -> Self {
        self.lambda_scaling = scaling;
        self
    }

    pub fn with_tail_tolerance(mut self, tol: f64) -> Self {
        self.tail_tolerance = tol;
        self
    }

    pub fn with_period_budget(mut self, budget: usize) -> Self {
        self.period_budget = budget;
        self
    }

    pub fn with_trace(mut self, record: bool) -> Self {
        self.record_trace = record;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda_sequence.is_empty() {
            return Err(Error::Policy("lambda_sequence is empty"));
        }
        if self.lambda_sequence.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::Policy("every lambda must be positive and finite"));
        }
        if self.lambda_sequence.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Policy("lambda_sequence must be strictly decreasing"));
        }
        if self.period_budget < 10 {
            return Err(Error::Policy("period_budget must be at least 10"));
        }
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance < 1.0) {
            return Err(Error::Policy("tail_tolerance must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Damping rate actually used for entry `lambda` at wavenumber `k`.
    pub fn damping(&self, lambda: f64, k: f64) -> f64 {
        match self.lambda_scaling {
            LambdaScaling::Absolute => lambda,
            LambdaScaling::RelativeToK => lambda * k,
        }
    }
}

/// One damped transform of the `λ`-sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LambdaSample {
    pub lambda: f64,
    pub value: f64,
    pub periods: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SineTransformResult {
    pub k: f64,
    pub value: f64,
    /// Damping rate of the reported value; `0` for direct summation and
    /// for extrapolated values.
    pub lambda_used: f64,
    /// Largest number of periods summed by any of the integrals.
    pub periods_summed: usize,
    /// Tail estimate `(4π/k)·e^{−λ r_I} r_I K(r_I)/k` of a plain partial
    /// sum cut after `periods_summed` periods, on the scale of `value`.
    pub truncation_bound: f64,
    /// Error estimate of `value` (acceleration plus extrapolation).
    pub error_estimate: f64,
    pub extrapolation: Option<RichardsonResult>,
    pub samples: Vec<LambdaSample>,
    /// Per-period contributions `(i, r_i, ΔK̂_i)` of the last integral.
    pub per_period_trace: Option<Vec<PeriodContribution>>,
}

fn check_inputs(profile: &ExponentProfile, k: f64) -> Result<()> {
    if profile.n() != 3 {
        return Err(Error::Dimension(profile.n()));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::domain("khat", k, "0 < k < inf"));
    }
    Ok(())
}

fn engine_options(policy: &RegularizationPolicy, damping: f64) -> SineIntegralOptions {
    SineIntegralOptions {
        damping,
        rel_tol: policy.tail_tolerance,
        max_periods: policy.period_budget,
        record_trace: policy.record_trace,
        ..Default::default()
    }
}

struct Damped {
    value: f64,
    error: f64,
    periods: usize,
    trace: Vec<PeriodContribution>,
}

fn damped_transform(profile: &ExponentProfile, k: f64, damping: f64, policy: &RegularizationPolicy) -> Result<Damped> {
    let p = |r: f64| p_unchecked(profile, r);
    let res = sine_integral(&p, k, &engine_options(policy, damping))?;
    let scale = 4.0 * PI / k;
    Ok(Damped {
        value: scale * res.value,
        error: scale * res.abs_error,
        periods: res.periods,
        trace: res
            .trace
            .into_iter()
            .map(|c| PeriodContribution {
                value: scale * c.value,
                ..c
            })
            .collect(),
    })
}

/// The damped transform `(4π/k)∫₀^∞ e^{−λr} p(r) sin(kr) dr` for one
/// damping rate `λ ≥ 0` (used as given, without scaling).
pub fn khat_at_lambda(profile: &ExponentProfile, k: f64, lambda: f64, policy: &RegularizationPolicy) -> Result<SineTransformResult> {
    check_inputs(profile, k)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::domain("khat_at_lambda", lambda, "lambda >= 0"));
    }
    let d = damped_transform(profile, k, lambda, policy)?;
    let bound = 4.0 * PI / k * truncation_error_estimate(profile, d.periods.max(1), k, lambda)?;
    Ok(SineTransformResult {
        k,
        value: d.value,
        lambda_used: lambda,
        periods_summed: d.periods,
        truncation_bound: bound,
        error_estimate: d.error,
        extrapolation: None,
        samples: alloc::vec![LambdaSample {
            lambda,
            value: d.value,
            periods: d.periods,
        }],
        per_period_trace: policy.record_trace.then_some(d.trace),
    })
}

/// `K̂(k)` for a three-dimensional profile.
///
/// Direct summation when `a = 1 − n + 2 s(∞) < 0`; otherwise the damped
/// transforms for the policy's `λ`-sequence, extrapolated to `λ = 0` when
/// the policy asks for it.
pub fn khat(profile: &ExponentProfile, k: f64, policy: &RegularizationPolicy) -> Result<SineTransformResult> {
    check_inputs(profile, k)?;
    policy.validate()?;
    if profile.decay_exponent() < 0.0 {
        return khat_at_lambda(profile, k, 0.0, policy);
    }
    let mut samples = Vec::with_capacity(policy.lambda_sequence.len());
    let mut last_trace = Vec::new();
    let mut last_error = 0.0;
    for &entry in &policy.lambda_sequence {
        let damping = policy.damping(entry, k);
        let d = damped_transform(profile, k, damping, policy)?;
        samples.push(LambdaSample {
            lambda: damping,
            value: d.value,
            periods: d.periods,
        });
        last_trace = d.trace;
        last_error = d.error;
    }
    let periods = samples.iter().map(|s| s.periods).max().unwrap_or(0);
    let smallest = samples[samples.len() - 1];
    let bound = 4.0 * PI / k * truncation_error_estimate(profile, smallest.periods.max(1), k, smallest.lambda)?;
    let (value, lambda_used, error, extrapolation) = match policy.extrapolation {
        Extrapolation::None => (smallest.value, smallest.lambda, last_error, None),
        Extrapolation::Richardson => {
            let xs: Vec<f64> = samples.iter().map(|s| s.lambda).collect();
            let ys: Vec<f64> = samples.iter().map(|s| s.value).collect();
            let rich = richardson_to_zero(&xs, &ys);
            let lambda_used = if rich.fallback { smallest.lambda } else { 0.0 };
            (rich.value, lambda_used, rich.error + last_error, Some(rich))
        }
    };
    Ok(SineTransformResult {
        k,
        value,
        lambda_used,
        periods_summed: periods,
        truncation_bound: bound,
        error_estimate: error,
        extrapolation,
        samples,
        per_period_trace: policy.record_trace.then_some(last_trace),
    })
}

/// Results of [`khat`] over a wavenumber grid. Failures at individual
/// wavenumbers are kept alongside the successes.
#[derive(Debug, Clone)]
pub struct KhatGrid {
    pub profile: ExponentProfile,
    pub policy: RegularizationPolicy,
    pub k: Vec<f64>,
    pub results: Vec<Result<SineTransformResult>>,
}

impl KhatGrid {
    /// Assembles a grid from results computed elsewhere (for instance in
    /// parallel), in the order of `k`.
    pub fn from_results(
        profile: ExponentProfile,
        policy: RegularizationPolicy,
        k: Vec<f64>,
        results: Vec<Result<SineTransformResult>>,
    ) -> Result<Self> {
        if k.len() != results.len() {
            return Err(Error::Grid("wavenumbers and results differ in length"));
        }
        Ok(Self {
            profile,
            policy,
            k,
            results,
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = (f64, &Error)> {
        self.k
            .iter()
            .zip(&self.results)
            .filter_map(|(k, r)| r.as_ref().err().map(|e| (*k, e)))
    }

    pub fn is_complete(&self) -> bool {
        self.results.iter().all(|r| r.is_ok())
    }

    /// Spectral table of the grid; fails on the first failed wavenumber.
    pub fn to_table(&self) -> Result<SpectralTable> {
        let mut values = Vec::with_capacity(self.k.len());
        for r in &self.results {
            match r {
                Ok(res) => values.push(res.value),
                Err(e) => return Err(e.clone()),
            }
        }
        SpectralTable::new(&self.profile, self.policy.clone(), self.k.clone(), values)
    }
}

fn check_sorted_grid(k_grid: &[f64]) -> Result<()> {
    if k_grid.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
        return Err(Error::Grid("wavenumbers must be positive and finite"));
    }
    if k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid("wavenumbers must be strictly increasing"));
    }
    Ok(())
}

/// [`khat`] at every wavenumber of an increasing grid.
pub fn khat_grid(profile: &ExponentProfile, k_grid: &[f64], policy: &RegularizationPolicy) -> Result<KhatGrid> {
    check_sorted_grid(k_grid)?;
    policy.validate()?;
    if profile.n() != 3 {
        return Err(Error::Dimension(profile.n()));
    }
    let results = k_grid.iter().map(|&k| khat(profile, k, policy)).collect();
    KhatGrid::from_results(profile.clone(), policy.clone(), k_grid.to_vec(), results)
}

fn check_period_args(profile: &ExponentProfile, k: f64, lambda: f64) -> Result<()> {
    check_inputs(profile, k)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::domain("per-period estimate", lambda, "lambda >= 0"));
    }
    Ok(())
}

/// Large-radius estimate of the contribution of period `i` to the damped
/// transform,
///
/// ```text
/// ΔK̂_i ≈ (8π²/k³) (λ − a/r_i) e^{−λ r_i} r_i K(r_i),   r_i = (i + 1/2)·2π/k,
/// ```
///
/// obtained by expanding `e^{−λr} p(r)` to first order about the period
/// midpoint with `p(r) ∝ r^a`. The neglected terms are `O(e^{−λ r_i} k^{−4})`.
pub fn delta_khat_estimate(profile: &ExponentProfile, i: usize, k: f64, lambda: f64) -> Result<f64> {
    check_period_args(profile, k, lambda)?;
    let a = profile.decay_exponent();
    let ri = period_midpoint(i, k);
    let damp = (-lambda * ri).exp();
    if damp == 0.0 {
        return Ok(0.0);
    }
    Ok(8.0 * PI * PI / (k * k * k) * (lambda - a / ri) * damp * ri * kernel_unchecked(profile, ri))
}

/// Contribution of period `i`, `(4π/k)∫ e^{−λr} p(r) sin(kr) dr` over
/// `[2πi/k, 2π(i+1)/k]`, by adaptive quadrature.
pub fn delta_khat_numeric(profile: &ExponentProfile, i: usize, k: f64, lambda: f64) -> Result<f64> {
    check_period_args(profile, k, lambda)?;
    let f = |r: f64| {
        let damp = (-lambda * r).exp();
        if damp == 0.0 {
            0.0
        } else {
            damp * p_unchecked(profile, r) * (k * r).sin()
        }
    };
    let opts = QuadratureOptions::default().with_rel_tol(1e-12);
    let half = PI / k;
    let a = 2.0 * i as f64 * half;
    let value = if i == 0 {
        integrate_graded_to_origin(&f, half, &opts)?.value + integrate(&f, half, 2.0 * half, &opts)?.value
    } else {
        integrate(&f, a, a + half, &opts)?.value + integrate(&f, a + half, a + 2.0 * half, &opts)?.value
    };
    Ok(4.0 * PI / k * value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PeriodTraceRow {
    pub i: usize,
    pub r_i: f64,
    pub delta_numeric: f64,
    pub delta_estimate: f64,
}

/// Numeric and estimated contributions of periods `0..count`.
pub fn period_trace(profile: &ExponentProfile, k: f64, lambda: f64, count: usize) -> Result<Vec<PeriodTraceRow>> {
    (0..count)
        .map(|i| {
            Ok(PeriodTraceRow {
                i,
                r_i: period_midpoint(i, k),
                delta_numeric: delta_khat_numeric(profile, i, k, lambda)?,
                delta_estimate: delta_khat_estimate(profile, i, k, lambda)?,
            })
        })
        .collect()
}

/// Fractional period index of the largest numeric contribution, refined by
/// a parabola through the maximum and its neighbours.
pub fn locate_delta_maximum(rows: &[PeriodTraceRow]) -> Option<f64> {
    let (j, _) = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.delta_numeric.total_cmp(&b.1.delta_numeric))?;
    if j == 0 || j + 1 >= rows.len() {
        return Some(rows[j].i as f64);
    }
    let (y0, y1, y2) = (rows[j - 1].delta_numeric, rows[j].delta_numeric, rows[j + 1].delta_numeric);
    let curvature = y0 - 2.0 * y1 + y2;
    let offset = if curvature != 0.0 { 0.5 * (y0 - y2) / curvature } else { 0.0 };
    Some(rows[j].i as f64 + offset)
}

/// Estimate `e^{−λ r_I} r_I K(r_I)/k`, `r_I = 2πI/k`, of the tail
/// `|∫_{r_I}^∞ e^{−λr} p(r) sin(kr) dr|` left out by truncating after `I`
/// periods. The neglected terms are `O(e^{−λ r_I} k^{−2})`.
pub fn truncation_error_estimate(profile: &ExponentProfile, periods: usize, k: f64, lambda: f64) -> Result<f64> {
    check_period_args(profile, k, lambda)?;
    if periods == 0 {
        return Err(Error::Invalid("truncation estimate needs at least one period"));
    }
    let r = 2.0 * PI * periods as f64 / k;
    let damp = (-lambda * r).exp();
    if damp == 0.0 {
        return Ok(0.0);
    }
    Ok(damp * r * kernel_unchecked(profile, r) / k)
}

/// The tail `∫_{r_I}^∞ e^{−λr} p(r) sin(kr) dr`, `r_I = 2πI/k`, summed
/// numerically (accelerated when `λ = 0`).
pub fn measured_tail(profile: &ExponentProfile, periods: usize, k: f64, lambda: f64) -> Result<f64> {
    check_period_args(profile, k, lambda)?;
    let r0 = 2.0 * PI * periods as f64 / k;
    let shift = (-lambda * r0).exp();
    // sin(k(r0 + t)) = sin(kt) because k r0 is a multiple of 2π
    let g = |t: f64| shift * p_unchecked(profile, r0 + t);
    let opts = SineIntegralOptions {
        damping: lambda,
        rel_tol: 1e-10,
        singular_origin: periods == 0,
        ..Default::default()
    };
    Ok(sine_integral(&g, k, &opts)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::{make_example1, make_example2};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn constant_order_closed_form() {
        let policy = RegularizationPolicy::default();
        let c = ExponentProfile::constant(0.6, 3);
        let r = khat(&c, 1.0, &policy).unwrap();
        assert!(rel(r.value, 1.0) < 1e-6, "{r:?}");
        assert_eq!(r.lambda_used, 0.0);
        assert!(r.truncation_bound >= 0.0);
        assert!(r.periods_summed <= policy.period_budget);
        let r = khat(&c, 2.0, &policy).unwrap();
        assert!(rel(r.value, 0.435_275_281_648_062) < 1e-6);
    }

    #[test]
    fn regularized_constant_order() {
        let c = ExponentProfile::constant(1.1, 3);
        let r = khat(&c, 2.0, &RegularizationPolicy::default()).unwrap();
        assert!(rel(r.value, 0.217_637_640_824_031) < 1e-3, "{r:?}");
        assert_eq!(r.samples.len(), 4);
        assert!(!r.extrapolation.unwrap().fallback);
    }

    #[test]
    fn example1_values() {
        // independent prototype (scipy quad plus epsilon summation)
        let p = make_example1();
        let policy = RegularizationPolicy::default();
        for (k, expected) in [(0.05, 194.729_276_035_47), (1.0, 0.993_284_010_724), (20.0, 0.025_855_789_280_527_2)] {
            let v = khat(&p, k, &policy).unwrap().value;
            assert!(rel(v, expected) < 1e-7, "k = {k}: {v}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let policy = RegularizationPolicy::default();
        assert!(matches!(
            khat(&ExponentProfile::constant(0.6, 2), 1.0, &policy),
            Err(Error::Dimension(2))
        ));
        assert!(khat(&make_example1(), 0.0, &policy).is_err());
        let bad = policy.clone().with_lambdas(alloc::vec![0.1, 0.2]);
        assert!(matches!(khat(&make_example2(), 1.0, &bad), Err(Error::Policy(_))));
        assert!(RegularizationPolicy::default().with_period_budget(5).validate().is_err());
    }

    #[test]
    fn grid_keeps_going_after_failures() {
        let policy = RegularizationPolicy::default().with_period_budget(10);
        let grid = khat_grid(&ExponentProfile::constant(0.6, 3), &[0.5, 1.0], &policy).unwrap();
        assert_eq!(grid.results.len(), 2);
        let empty = khat_grid(&make_example1(), &[], &RegularizationPolicy::default()).unwrap();
        assert!(empty.results.is_empty());
        assert!(khat_grid(&make_example1(), &[2.0, 1.0], &RegularizationPolicy::default()).is_err());
    }

    #[test]
    fn period_estimate_signs() {
        let p = make_example2();
        // the leading factor λ − a/r_i changes sign at r_i = a/λ = 6, i ≈ 4.3
        let (k, lambda) = (5.0, 0.1);
        let before = delta_khat_estimate(&p, 2, k, lambda).unwrap();
        let after = delta_khat_estimate(&p, 20, k, lambda).unwrap();
        assert!(before < 0.0 && after > 0.0);
        let big = delta_khat_numeric(&p, 500, k, 1.0).unwrap();
        assert!(big.abs() < 1e-200 && delta_khat_estimate(&p, 500, k, 1.0).unwrap().abs() < 1e-200);
    }

    #[test]
    fn trace_sums_to_the_transform() {
        let p = make_example1();
        let policy = RegularizationPolicy::default().with_trace(true);
        let r = khat(&p, 3.0, &policy).unwrap();
        let trace = r.per_period_trace.unwrap();
        let direct = delta_khat_numeric(&p, 3, 3.0, 0.0).unwrap();
        assert!(rel(trace[3].value, direct) < 1e-9);
        assert!(rel(trace[0].value, delta_khat_numeric(&p, 0, 3.0, 0.0).unwrap()) < 1e-9);
    }

    #[test]
    fn truncation_estimate_limits() {
        let p = make_example2();
        let small = truncation_error_estimate(&p, 40, 5.0, 50.0).unwrap();
        assert!(small < 1e-200);
        let ex1 = make_example1();
        let b1 = truncation_error_estimate(&ex1, 1000, 1.0, 0.0).unwrap();
        let b2 = truncation_error_estimate(&ex1, 2000, 1.0, 0.0).unwrap();
        assert!((b2 / b1 - 2f64.powf(-0.2)).abs() < 1e-3);
        assert!(truncation_error_estimate(&p, 0, 5.0, 0.1).is_err());
    }
}
