//! Half-period summation of `∫₀^∞ e^{−λr} g(r) sin(ωr) dr`.
//!
//! The half-line is cut at the zeros `jπ/ω` of the sine. Each lobe is
//! integrated adaptively and the partial sums are accumulated lobe by lobe.
//! The first lobes are handled by graded subdivision toward the origin so
//! that weakly singular `g` is allowed. Slowly decaying alternating sums are
//! accelerated with the epsilon algorithm.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::accel::EpsilonAccelerator;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_graded_to_origin, QuadratureOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineIntegralOptions {
    /// Damping rate `λ ≥ 0` of the factor `e^{−λ(r − start)}`.
    pub damping: f64,
    /// Relative accuracy at which summation stops.
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Budget in full periods `2π/ω`.
    pub max_periods: usize,
    /// Number of partial sums kept by the epsilon accelerator.
    pub epsilon_window: usize,
    /// Accelerated estimates are only trusted past this radius.
    pub accelerate_from: f64,
    /// The integrand vanishes beyond this radius.
    pub support_end: Option<f64>,
    /// Grade the first lobes toward `r = 0`.
    pub singular_origin: bool,
    /// Lower limit of integration; `0` for the half-line.
    pub start: f64,
    pub record_trace: bool,
    pub quadrature: QuadratureOptions,
}

impl Default for SineIntegralOptions {
    fn default() -> Self {
        Self {
            damping: 0.0,
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_periods: 100_000,
            epsilon_window: 40,
            accelerate_from: 0.0,
            support_end: None,
            singular_origin: true,
            start: 0.0,
            record_trace: false,
            quadrature: QuadratureOptions::default().with_rel_tol(1e-13),
        }
    }
}

/// Integral over the full period `[2πi/ω, 2π(i+1)/ω]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PeriodContribution {
    pub index: usize,
    /// Period midpoint `(i + 1/2)·2π/ω`.
    pub r_mid: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SineIntegral {
    pub value: f64,
    pub abs_error: f64,
    /// Full periods summed (a trailing half period counts as one).
    pub periods: usize,
    /// Right end of the last lobe integrated.
    pub r_end: f64,
    /// Value of the last completed full period.
    pub last_period: f64,
    /// Whether the result is the epsilon-accelerated limit rather than a
    /// partial sum.
    pub accelerated: bool,
    pub trace: Vec<PeriodContribution>,
}

/// Period midpoint `r_i = (i + 1/2)·2π/ω`.
pub fn period_midpoint(index: usize, omega: f64) -> f64 {
    (index as f64 + 0.5) * 2.0 * PI / omega
}

/// `∫₀^∞ e^{−λr} g(r) sin(ωr) dr` for `ω > 0`.
pub fn sine_integral<G: Fn(f64) -> f64>(g: &G, omega: f64, opts: &SineIntegralOptions) -> Result<SineIntegral> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::domain("sine_integral", omega, "omega > 0"));
    }
    if !(opts.damping >= 0.0) {
        return Err(Error::domain("sine_integral", opts.damping, "damping >= 0"));
    }
    let lambda = opts.damping;
    let f = |r: f64| {
        let damp = if lambda > 0.0 { (-lambda * (r - opts.start)).exp() } else { 1.0 };
        if damp == 0.0 {
            return 0.0;
        }
        damp * g(r) * (omega * r).sin()
    };
    let half = PI / omega;
    let lobe_end = |j: usize| (j as f64) * half;

    let clip = |b: f64| opts.support_end.map_or(b, |e| b.min(e));
    if opts.support_end.is_some_and(|e| !(e > 0.0)) {
        return Err(Error::domain("sine_integral", opts.support_end.unwrap_or(0.0), "support_end > 0"));
    }

    if !(opts.start >= 0.0) {
        return Err(Error::domain("sine_integral", opts.start, "start >= 0"));
    }
    let q = opts.quadrature;
    let (mut sum, j0) = if opts.start > 0.0 {
        // Partial first lobe up to the next zero of the sine.
        let j_first = (opts.start / half).floor() as usize + 1;
        let b = clip(lobe_end(j_first));
        let first = if b > opts.start { integrate(&f, opts.start, b, &q)?.value } else { 0.0 };
        (first, j_first)
    } else {
        // Origin piece: [0, j0·h].
        let split = (2.0 * half).min(1.0);
        let j0 = ((split / half).ceil() as usize).clamp(1, 2);
        let mut sum = if opts.singular_origin {
            integrate_graded_to_origin(&f, clip(split), &q)?.value
        } else {
            integrate(&f, 0.0, clip(split), &q)?.value
        };
        if clip(lobe_end(j0)) > clip(split) {
            sum += integrate(&f, clip(split), clip(lobe_end(j0)), &q)?.value;
        }
        (sum, j0)
    };

    let mut trace = Vec::new();
    let mut period_acc = sum;
    let mut last_period = 0.0;
    let mut accel = EpsilonAccelerator::new(opts.epsilon_window);
    let mut prev_lobe = f64::INFINITY;
    let mut shrinking = 0usize;
    let max_lobes = opts.max_periods.saturating_mul(2);
    let mut j = j0;
    let mut last_error = f64::INFINITY;

    let finish_period = |j_done: usize, acc: &mut f64, trace: &mut Vec<PeriodContribution>, last: &mut f64| {
        // j_done lobes are complete; a period closes after every odd lobe.
        if j_done % 2 == 0 {
            let index = j_done / 2 - 1;
            *last = *acc;
            if opts.record_trace {
                trace.push(PeriodContribution {
                    index,
                    r_mid: period_midpoint(index, omega),
                    value: *acc,
                });
            }
            *acc = 0.0;
        }
    };
    if j0 % 2 == 0 {
        finish_period(j0, &mut period_acc, &mut trace, &mut last_period);
    }
    // A trailing half period is recorded as a period of its own.
    let flush = |j_done: usize, acc: f64, trace: &mut Vec<PeriodContribution>| {
        if j_done % 2 == 1 && opts.record_trace {
            trace.push(PeriodContribution {
                index: j_done / 2,
                r_mid: period_midpoint(j_done / 2, omega),
                value: acc,
            });
        }
    };

    loop {
        if let Some(end) = opts.support_end {
            if lobe_end(j) >= end {
                flush(j, period_acc, &mut trace);
                return Ok(SineIntegral {
                    value: sum,
                    abs_error: 0.0,
                    periods: j.div_ceil(2),
                    r_end: lobe_end(j),
                    last_period,
                    accelerated: false,
                    trace,
                });
            }
        }
        if j >= max_lobes {
            return Err(Error::NonConvergence {
                frequency: omega,
                periods: j.div_ceil(2),
                tail: last_error,
            });
        }
        let tol_scale = opts.abs_tol.max(opts.rel_tol * sum.abs());
        let lobe_q = q.with_abs_tol(q.abs_tol.max(1e-3 * tol_scale));
        let lobe = integrate(&f, lobe_end(j), clip(lobe_end(j + 1)), &lobe_q)?.value;
        sum += lobe;
        period_acc += lobe;
        j += 1;
        finish_period(j, &mut period_acc, &mut trace, &mut last_period);

        if lobe.abs() <= prev_lobe {
            shrinking += 1;
        } else {
            shrinking = 0;
        }
        prev_lobe = lobe.abs();
        let tol = opts.abs_tol.max(opts.rel_tol * sum.abs());

        // Damped or fast-decaying tails: an alternating series with
        // shrinking terms is bounded by its next term.
        if shrinking >= 3 && lobe.abs() <= tol {
            flush(j, period_acc, &mut trace);
            return Ok(SineIntegral {
                value: sum - 0.5 * lobe,
                abs_error: 0.5 * lobe.abs(),
                periods: j.div_ceil(2),
                r_end: lobe_end(j),
                last_period,
                accelerated: false,
                trace,
            });
        }
        last_error = lobe.abs();
        if let Some(est) = accel.push(sum) {
            let ready = shrinking >= 4 && accel.len() >= 12.min(opts.epsilon_window) && lobe_end(j) >= opts.accelerate_from;
            if ready && est.value.is_finite() {
                last_error = last_error.min(est.error);
                let tol = opts.abs_tol.max(opts.rel_tol * est.value.abs());
                if est.error <= tol {
                    flush(j, period_acc, &mut trace);
                    return Ok(SineIntegral {
                        value: est.value,
                        abs_error: est.error,
                        periods: j.div_ceil(2),
                        r_end: lobe_end(j),
                        last_period,
                        accelerated: true,
                        trace,
                    });
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfun::gamma;

    // ∫₀^∞ r^(μ−1) e^(−λr) sin(ωr) dr = Γ(μ) (λ² + ω²)^(−μ/2) sin(μ atan(ω/λ))
    fn damped_power(mu: f64, omega: f64, lambda: f64) -> f64 {
        let g = if mu > 0.0 { gamma(mu).unwrap() } else { gamma(mu + 1.0).unwrap() / mu };
        g * (lambda * lambda + omega * omega).powf(-0.5 * mu) * (mu * omega.atan2(lambda)).sin()
    }

    #[test]
    fn undamped_power_law_is_accelerated() {
        for (mu, omega) in [(0.2, 1.0), (0.6, 3.0), (-0.4, 0.5), (0.9, 20.0)] {
            let g = |r: f64| r.powf(mu - 1.0);
            let res = sine_integral(&g, omega, &SineIntegralOptions::default()).unwrap();
            let exact = damped_power(mu, omega, 0.0);
            assert!(((res.value - exact) / exact).abs() < 1e-9, "mu {mu} omega {omega}: {res:?} vs {exact}");
            assert!(res.accelerated);
        }
    }

    #[test]
    fn damped_growing_power_law() {
        // μ > 1: the undamped integral diverges; the damped one is finite.
        for (mu, omega, lambda) in [(1.6, 1.0, 0.1), (1.2, 5.0, 0.025), (1.9, 2.0, 0.2)] {
            let g = |r: f64| r.powf(mu - 1.0);
            let opts = SineIntegralOptions { damping: lambda, ..Default::default() };
            let res = sine_integral(&g, omega, &opts).unwrap();
            let exact = damped_power(mu, omega, lambda);
            assert!(((res.value - exact) / exact).abs() < 1e-8, "{mu} {omega} {lambda}: {} vs {exact}", res.value);
        }
    }

    #[test]
    fn trace_periods_add_up() {
        let g = |r: f64| (-r).exp();
        let opts = SineIntegralOptions {
            record_trace: true,
            rel_tol: 1e-14,
            ..Default::default()
        };
        let res = sine_integral(&g, 2.0, &opts).unwrap();
        // ∫ e^{-r} sin(2r) dr = 2/5
        assert!((res.value - 0.4).abs() < 1e-12);
        let total: f64 = res.trace.iter().map(|p| p.value).sum();
        assert!((total - 0.4).abs() < 1e-9, "{total}");
        assert_eq!(res.trace[0].index, 0);
        assert!((res.trace[1].r_mid - 1.5 * PI).abs() < 1e-14);
    }

    #[test]
    fn compact_support_stops_at_the_end() {
        let g = |r: f64| if r < 3.0 { 1.0 } else { 0.0 };
        let opts = SineIntegralOptions {
            support_end: Some(3.0 * PI),
            ..Default::default()
        };
        // ω = 1: ∫₀^{3π} sin r dr = 2 for the truncated integrand ∫₀^3 sin r dr = 1 − cos 3
        let res = sine_integral(&g, 1.0, &opts).unwrap();
        assert!((res.value - (1.0 - 3f64.cos())).abs() < 1e-9, "{}", res.value);
    }

    #[test]
    fn integration_from_an_inner_start() {
        // ∫_a^∞ e^{-r} sin(r) dr = e^{-a} (sin a + cos a) / 2
        for a in [0.3, 2.0, 7.7] {
            let g = |r: f64| (-r).exp();
            let opts = SineIntegralOptions { start: a, rel_tol: 1e-13, ..Default::default() };
            let res = sine_integral(&g, 1.0, &opts).unwrap();
            let exact = (-a).exp() * (a.sin() + a.cos()) / 2.0;
            assert!((res.value - exact).abs() < 1e-13, "{a}: {} vs {exact}", res.value);
        }
        // undamped power-law tail from a = 5: total minus the head
        let g = |r: f64| r.powf(-0.7);
        let tail = sine_integral(&g, 2.0, &SineIntegralOptions { start: 5.0, ..Default::default() }).unwrap();
        let head = crate::quadrature::integrate_graded_to_origin(
            &|r: f64| g(r) * (2.0 * r).sin(),
            5.0,
            &QuadratureOptions::default().with_rel_tol(1e-13),
        )
        .unwrap();
        let exact = damped_power(0.3, 2.0, 0.0);
        assert!(((head.value + tail.value - exact) / exact).abs() < 1e-9);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let g = |r: f64| r.powf(0.5);
        let opts = SineIntegralOptions {
            max_periods: 10,
            ..Default::default()
        };
        let err = sine_integral(&g, 1.0, &opts).unwrap_err();
        assert!(err.is_non_convergence());
        assert!(sine_integral(&g, 0.0, &opts).is_err());
    }
}
