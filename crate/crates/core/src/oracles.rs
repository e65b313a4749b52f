//! Independent reference computations and executable checks of the
//! closed-form identities, the Example 1 lemma and proposition, the
//! per-period and truncation estimates, and the spectral solver.
//!
//! Every check returns a [`CheckReport`] whose verdict follows one rule:
//! `passed ⇔ |measured − expected| ≤ tolerance · max(|expected|, 1e-300)`.
//! Checks that count violations report the count against an expected `0`
//! with tolerance `0`. Upper bounds `x ≤ 2y` are reported as the ratio
//! `x/y` against `1` with tolerance `1`. Relative L² errors are reported as
//! `measured = ‖b‖ + ‖a − b‖` against `expected = ‖b‖`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;
use crate::exponent::{make_example1, make_example2, ExponentProfile};
use crate::kernel::{
    green_function, kernel_eval, p_asymptotics_example1, p_derivative_example1, p_unchecked, AsymptoticRegime,
};
use crate::quadrature::{integrate, integrate_graded_to_origin, QuadratureOptions};
use crate::sinexform::{
    delta_khat_estimate, delta_khat_numeric, khat, khat_grid, locate_delta_maximum, measured_tail, period_trace,
    truncation_error_estimate, LambdaScaling, RegularizationPolicy,
};
use crate::spectral::{
    apply_vofl_with, default_table_grid, poisson_residual, riesz_apply_with, solve_poisson_with, GaussianSource,
    RadialField, RadialFunction, SpectralTable, TransformOptions,
};

pub const CHECK_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        let passed = (measured - expected).abs() <= tolerance * expected.abs().max(CHECK_FLOOR);
        Self {
            name: name.into(),
            passed,
            measured,
            expected,
            tolerance,
            detail: detail.into(),
        }
    }

    /// `count` violations out of `total` samples; passes only for zero.
    pub fn count(name: impl Into<String>, count: usize, total: usize, detail: impl AsRef<str>) -> Self {
        Self::new(
            name,
            count as f64,
            0.0,
            0.0,
            format!("{count} of {total} samples violate the property; {}", detail.as_ref()),
        )
    }

    /// `value ≤ factor · bound`, reported as the ratio against 1.
    pub fn ratio_bound(name: impl Into<String>, ratio: f64, factor: f64, detail: impl AsRef<str>) -> Self {
        let half = 0.5 * factor;
        Self::new(
            name,
            ratio / half,
            1.0,
            1.0,
            format!("worst ratio {ratio:.6e} (limit {factor}); {}", detail.as_ref()),
        )
    }

    /// Relative L² error of `approx` against `reference`.
    pub fn relative_l2(name: impl Into<String>, approx: &[f64], reference: &[f64], tolerance: f64) -> Self {
        let norm = reference.iter().map(|v| v * v).sum::<f64>().sqrt();
        let err = approx
            .iter()
            .zip(reference)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        Self::new(
            name,
            norm + err,
            norm,
            tolerance,
            format!("relative L2 error {:.3e} over {} samples", err / norm.max(CHECK_FLOOR), reference.len()),
        )
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, error: impl ToString) -> Self {
        Self {
            name: name.into(),
            passed: false,
            measured: f64::NAN,
            expected: f64::NAN,
            tolerance: 0.0,
            detail: error.to_string(),
        }
    }
}

fn worst_relative(pairs: impl Iterator<Item = (f64, f64, f64)>) -> Option<(f64, f64, f64)> {
    pairs.max_by(|a, b| {
        let ea = ((a.1 - a.2) / a.2).abs();
        let eb = ((b.1 - b.2) / b.2).abs();
        ea.total_cmp(&eb)
    })
}

/// `K̂` of the constant order `s` against `k^(−2s)` on `k_grid`.
pub fn check_constant_order_identity(s: f64, k_grid: &[f64], tolerance: f64) -> CheckReport {
    let name = format!("constant-order identity s = {s}");
    let profile = ExponentProfile::constant(s, 3);
    let policy = RegularizationPolicy::default();
    let mut rows = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        match khat(&profile, k, &policy) {
            Ok(r) => rows.push((k, r.value, k.powf(-2.0 * s))),
            Err(e) => return CheckReport::failed(name, format!("k = {k}: {e}")),
        }
    }
    match worst_relative(rows.into_iter()) {
        Some((k, m, e)) => CheckReport::new(
            name,
            m,
            e,
            tolerance,
            format!("worst of {} wavenumbers at k = {k}", k_grid.len()),
        ),
        None => CheckReport::failed(name, "empty wavenumber grid"),
    }
}

/// The classical limit `s ≡ 1`: the Green's function `−1/(4πr)` on
/// `r_grid`, and the symbol `k^(−2)` on `k_grid`.
pub fn check_classical_limit(k_grid: &[f64], r_grid: &[f64]) -> [CheckReport; 2] {
    let unit = ExponentProfile::constant(1.0, 3);
    let rows = r_grid
        .iter()
        .filter_map(|&r| green_function(&unit, r).ok().map(|g| (r, g.phi_value, -1.0 / (4.0 * PI * r))));
    let green = match worst_relative(rows) {
        Some((r, m, e)) => CheckReport::new(
            "classical Green's function",
            m,
            e,
            1e-10,
            format!("worst of {} radii at r = {r}", r_grid.len()),
        ),
        None => CheckReport::failed("classical Green's function", "empty radial grid"),
    };
    let mut spectrum = check_constant_order_identity(1.0, k_grid, 1e-3);
    spectrum.name = "classical symbol k^-2".into();
    [green, spectrum]
}

/// Positivity of `K̂` for Example 1.
pub fn check_example1_positivity(k_grid: &[f64]) -> CheckReport {
    let profile = make_example1();
    let policy = RegularizationPolicy::default();
    let mut bad = 0;
    let mut min = f64::INFINITY;
    let mut errors = 0;
    for &k in k_grid {
        match khat(&profile, k, &policy) {
            Ok(r) => {
                min = min.min(r.value);
                if !(r.value > 0.0) {
                    bad += 1;
                }
            }
            Err(_) => {
                bad += 1;
                errors += 1;
            }
        }
    }
    CheckReport::count(
        "example 1 symbol positivity",
        bad,
        k_grid.len(),
        format!("smallest value {min:.6e}, {errors} evaluation failures"),
    )
}

/// Monotone decay of `p(r)` for Example 1, the sign of the closed-form
/// derivative, and the limits `p(1e-8) > 1e3`, `p(1e8) < 1e-1`.
pub fn check_example1_monotonicity(r_grid: &[f64]) -> CheckReport {
    let profile = make_example1();
    let p: Vec<f64> = r_grid.iter().map(|&r| kernel_eval(&profile, r).map_or(f64::NAN, |k| k.p_value)).collect();
    let increases = p.windows(2).filter(|w| !(w[1] < w[0])).count();
    let positive_slopes = r_grid
        .iter()
        .filter(|&&r| !p_derivative_example1(r).is_ok_and(|d| d < 0.0))
        .count();
    let p_small = kernel_eval(&profile, 1e-8).map_or(f64::NAN, |k| k.p_value);
    let p_large = kernel_eval(&profile, 1e8).map_or(f64::NAN, |k| k.p_value);
    let limits = usize::from(!(p_small > 1e3)) + usize::from(!(p_large < 1e-1));
    CheckReport::count(
        "example 1 p decreasing",
        increases + positive_slopes + limits,
        2 * r_grid.len() + 1,
        format!(
            "{increases} non-decreasing steps, {positive_slopes} non-negative p', p(1e-8) = {p_small:.6e}, p(1e8) = {p_large:.6e}"
        ),
    )
}

/// Closed-form `p′` against a centred difference with step `10⁻⁶ r`.
pub fn check_example1_derivative(r_grid: &[f64]) -> CheckReport {
    let profile = make_example1();
    let p = |r: f64| kernel_eval(&profile, r).map_or(f64::NAN, |k| k.p_value);
    let rows = r_grid.iter().map(|&r| {
        let h = 1e-6 * r;
        let fd = (p(r + h) - p(r - h)) / (2.0 * h);
        (r, p_derivative_example1(r).unwrap_or(f64::NAN), fd)
    });
    match worst_relative(rows) {
        Some((r, m, e)) => CheckReport::new(
            "example 1 closed-form derivative",
            m,
            e,
            1e-5,
            format!("worst of {} radii at r = {r}", r_grid.len()),
        ),
        None => CheckReport::failed("example 1 closed-form derivative", "empty radial grid"),
    }
}

/// The two-term expansion at `r = 1e-4` and the tail term at `r = 1e4`.
pub fn check_example1_asymptotics() -> [CheckReport; 2] {
    let profile = make_example1();
    let report = |name: &str, r: f64, regime, tol| match (kernel_eval(&profile, r), p_asymptotics_example1(r, regime)) {
        (Ok(k), Ok(a)) => CheckReport::new(name, a, k.p_value, tol, format!("r = {r}")),
        (Err(e), _) | (_, Err(e)) => CheckReport::failed(name, e),
    };
    [
        report("example 1 expansion near zero", 1e-4, AsymptoticRegime::NearZero, 5e-3),
        report("example 1 expansion near infinity", 1e4, AsymptoticRegime::NearInfinity, 1e-2),
    ]
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len()) as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Slope of `ln K̂` against `ln k` on `range`, from at least 8 points per
/// decade.
pub fn khat_slope(profile: &ExponentProfile, range: (f64, f64), policy: &RegularizationPolicy) -> Result<f64> {
    let decades = (range.1 / range.0).log10();
    let count = ((8.0 * decades).ceil() as usize).max(8);
    let ks = crate::log_grid(range.0, range.1, count);
    let values = ks.iter().map(|&k| khat(profile, k, policy).map(|r| r.value)).collect::<Result<Vec<f64>>>()?;
    Ok(fit_loglog_slope(&ks, &values))
}

/// Log–log slopes of `K̂` near `k_small` (expected `−2 s(∞)`) and near
/// `k_large` (expected `−2 s(0)`), each within `0.1`.
pub fn check_asymptotic_slopes(profile: &ExponentProfile, k_small: (f64, f64), k_large: (f64, f64)) -> [CheckReport; 2] {
    let policy = RegularizationPolicy::default().with_scaling(LambdaScaling::RelativeToK);
    let report = |name: &str, range: (f64, f64), expected: f64| match khat_slope(profile, range, &policy) {
        Ok(slope) => CheckReport::new(
            format!("{name} slope of {profile}"),
            slope,
            expected,
            0.1 / expected.abs(),
            format!("k in [{}, {}], absolute tolerance 0.1", range.0, range.1),
        ),
        Err(e) => CheckReport::failed(name, e),
    };
    [
        report("small-k", k_small, -2.0 * profile.s_at_infinity()),
        report("large-k", k_large, -2.0 * profile.s_at_zero()),
    ]
}

/// Per-period estimate against numeric period integrals at indices
/// `indices` (increasing): the relative deviation must decrease and be at
/// most `final_tolerance` at the last index.
pub fn check_period_estimate(profile: &ExponentProfile, k: f64, lambda: f64, indices: &[usize], final_tolerance: f64) -> [CheckReport; 2] {
    let mut devs = Vec::new();
    let mut last = (f64::NAN, f64::NAN);
    for &i in indices {
        match (delta_khat_estimate(profile, i, k, lambda), delta_khat_numeric(profile, i, k, lambda)) {
            (Ok(e), Ok(n)) => {
                devs.push(((e - n) / n).abs());
                last = (e, n);
            }
            (Err(e), _) | (_, Err(e)) => {
                let f = CheckReport::failed("period estimate", &e);
                return [f.clone(), f];
            }
        }
    }
    let increases = devs.windows(2).filter(|w| !(w[1] < w[0])).count();
    let listing: Vec<String> = indices.iter().zip(&devs).map(|(i, d)| format!("i = {i}: {d:.3e}")).collect();
    [
        CheckReport::count(
            format!("period estimate converges (k = {k}, lambda = {lambda})"),
            increases,
            devs.len().saturating_sub(1),
            listing.join(", "),
        ),
        CheckReport::new(
            format!("period estimate at i = {}", indices.last().copied().unwrap_or(0)),
            last.0,
            last.1,
            final_tolerance,
            "estimate against numeric period integral",
        ),
    ]
}

/// Location of the largest period contribution, in units of `k/λ`, for
/// each `(k, λ)` pair.
pub fn delta_maximum_locations(profile: &ExponentProfile, pairs: &[(f64, f64)]) -> Result<Vec<f64>> {
    pairs
        .iter()
        .map(|&(k, lambda)| {
            let count = (4.0 * k / lambda).ceil() as usize;
            let rows = period_trace(profile, k, lambda, count)?;
            let i = locate_delta_maximum(&rows).unwrap_or(f64::NAN);
            Ok(i * lambda / k)
        })
        .collect()
}

/// Proportionality of the maximum location to `k/λ`: every ratio within
/// `tolerance` of their mean.
pub fn check_delta_maximum_scaling(profile: &ExponentProfile, pairs: &[(f64, f64)], tolerance: f64) -> CheckReport {
    let name = "period maximum scales with k/lambda";
    match delta_maximum_locations(profile, pairs) {
        Ok(c) if !c.is_empty() => {
            let mean = c.iter().sum::<f64>() / c.len() as f64;
            let worst = c.iter().copied().max_by(|a, b| (a - mean).abs().total_cmp(&(b - mean).abs())).unwrap_or(mean);
            let listing: Vec<String> = pairs
                .iter()
                .zip(&c)
                .map(|((k, l), v)| format!("(k = {k}, lambda = {l}): i* lambda/k = {v:.4}"))
                .collect();
            CheckReport::new(name, worst, mean, tolerance, listing.join(", "))
        }
        Ok(_) => CheckReport::failed(name, "no (k, lambda) pairs"),
        Err(e) => CheckReport::failed(name, e),
    }
}

/// Measured tails against twice the truncation estimate.
pub fn check_truncation_bound(profile: &ExponentProfile, k: f64, lambda: f64, periods: &[usize]) -> CheckReport {
    let name = format!("truncation estimate bounds the tail ({profile}, k = {k}, lambda = {lambda})");
    let mut worst = 0.0f64;
    let mut listing = Vec::new();
    for &i in periods {
        match (measured_tail(profile, i, k, lambda), truncation_error_estimate(profile, i, k, lambda)) {
            (Ok(t), Ok(b)) => {
                let ratio = t.abs() / b;
                worst = worst.max(ratio);
                listing.push(format!("I = {i}: {ratio:.4}"));
            }
            (Err(e), _) | (_, Err(e)) => return CheckReport::failed(name, e),
        }
    }
    CheckReport::ratio_bound(name, worst, 2.0, listing.join(", "))
}

/// `(K ⋆ g)(r)` by direct quadrature of the radial convolution
///
/// ```text
/// (K ⋆ g)(r) = (2π/r) ∫₀^∞ r′ g(r′) [P(r + r′) − P(|r − r′|)] dr′,   P(ρ) = ∫₀^ρ p.
/// ```
///
/// Slow; used only as a reference for the spectral Riesz potential.
pub fn direct_convolution_oracle<G: RadialFunction + ?Sized>(profile: &ExponentProfile, source: &G, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(crate::Error::domain("direct_convolution_oracle", r, "r > 0"));
    }
    let opts = QuadratureOptions::default().with_rel_tol(1e-11).with_max_subintervals(2000);
    let p = |x: f64| p_unchecked(profile, x);
    let p_one = integrate_graded_to_origin(&p, 1.0, &opts)?.value;
    let big_p = |rho: f64| -> Result<f64> {
        if rho == 0.0 {
            return Ok(0.0);
        }
        if rho >= 1.0 {
            Ok(p_one + integrate(&p, 1.0, rho, &opts)?.value)
        } else if rho > 1e-3 {
            Ok(p_one - integrate(&p, rho, 1.0, &opts)?.value)
        } else {
            Ok(integrate_graded_to_origin(&p, rho, &opts)?.value)
        }
    };
    let outer_opts = QuadratureOptions::default().with_rel_tol(1e-9).with_max_subintervals(2000);
    let failure = core::cell::Cell::new(None);
    let integrand = |rp: f64| {
        let g = source.value(rp);
        if g == 0.0 {
            return 0.0;
        }
        match (big_p(r + rp), big_p((r - rp).abs())) {
            (Ok(a), Ok(b)) => rp * g * (a - b),
            (Err(e), _) | (_, Err(e)) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let end = source.extent();
    let mut total = integrate(&integrand, 0.0, r.min(end), &outer_opts)?.value;
    if end > r {
        total += integrate(&integrand, r, end, &outer_opts)?.value;
    }
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(2.0 * PI / r * total)
}

/// Spectral symbol table for `profile` serving fields on `[r_min, r_max]`.
pub fn build_table(profile: &ExponentProfile, r_min: f64, r_max: f64, per_decade: usize) -> Result<SpectralTable> {
    let ks = default_table_grid(r_min, r_max, per_decade)?;
    let policy = RegularizationPolicy::default().with_scaling(LambdaScaling::RelativeToK);
    khat_grid(profile, &ks, &policy)?.to_table()
}

/// Radial grid used for the solver checks.
pub fn solver_grid() -> Vec<f64> {
    crate::log_grid(1e-3, 12.0, 400)
}

/// Round trips `I(L f)`, `L(I f)` and the Poisson residual for a Gaussian
/// field, each compared on the samples with `r ∈ [0.1, 5]`.
pub fn check_inversion(profile: &ExponentProfile, table: &SpectralTable, tolerance: f64) -> [CheckReport; 3] {
    let grid = solver_grid();
    let opts = TransformOptions::default();
    let f = match RadialField::from_fn(&grid, |r| (-r * r).exp()) {
        Ok(f) => f,
        Err(e) => {
            let x = CheckReport::failed("inversion", e);
            return [x.clone(), x.clone(), x];
        }
    };
    let window: Vec<usize> = (0..grid.len()).filter(|&i| grid[i] >= 0.1 && grid[i] <= 5.0).collect();
    let pick = |v: &[f64]| window.iter().map(|&i| v[i]).collect::<Vec<f64>>();
    let reference = pick(f.values());

    let riesz_of_vofl = apply_vofl_with(profile, &f, table, &opts)
        .and_then(|(l, _)| riesz_apply_with(profile, &l, table, &opts))
        .map(|(x, _)| x);
    let vofl_of_riesz = riesz_apply_with(profile, &f, table, &opts)
        .and_then(|(l, _)| apply_vofl_with(profile, &l, table, &opts))
        .map(|(x, _)| x);
    let report = |name: &str, r: Result<RadialField>| match r {
        Ok(x) => CheckReport::relative_l2(name, &pick(x.values()), &reference, tolerance),
        Err(e) => CheckReport::failed(name, e),
    };
    let residual = match solve_poisson_with(profile, &f, table, &opts)
        .and_then(|s| poisson_residual_window(profile, &s.solution, &f, table, &opts, &window))
    {
        Ok((lap, target)) => CheckReport::relative_l2("poisson residual", &lap, &target, tolerance),
        Err(e) => CheckReport::failed("poisson residual", e),
    };
    [
        report("riesz after vofl is the identity", riesz_of_vofl),
        report("vofl after riesz is the identity", vofl_of_riesz),
        residual,
    ]
}

fn poisson_residual_window(
    profile: &ExponentProfile,
    solution: &RadialField,
    source: &RadialField,
    table: &SpectralTable,
    opts: &TransformOptions,
    window: &[usize],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (lap, _) = apply_vofl_with(profile, solution, table, opts)?;
    // L f = −g
    let lap: Vec<f64> = window.iter().map(|&i| lap.values()[i]).collect();
    let target: Vec<f64> = window.iter().map(|&i| -source.values()[i]).collect();
    let _ = poisson_residual;
    Ok((lap, target))
}

/// Spectral Riesz potential of a unit Gaussian against the direct
/// convolution at `radii`.
pub fn check_spectral_vs_direct(profile: &ExponentProfile, table: &SpectralTable, radii: &[f64], tolerance: f64) -> CheckReport {
    let name = format!("spectral and direct convolution agree ({profile})");
    let source = match GaussianSource::new(1.0, 1.0) {
        Ok(s) => s,
        Err(e) => return CheckReport::failed(name, e),
    };
    let grid = solver_grid();
    let spectral = RadialField::sample(&source, &grid)
        .and_then(|g| riesz_apply_with(profile, &g, table, &TransformOptions::default()))
        .map(|(x, _)| x);
    let spectral = match spectral {
        Ok(s) => s,
        Err(e) => return CheckReport::failed(name, e),
    };
    let mut rows = Vec::new();
    for &r in radii {
        match direct_convolution_oracle(profile, &source, r) {
            Ok(d) => rows.push((r, spectral.eval(r), d)),
            Err(e) => return CheckReport::failed(name, format!("r = {r}: {e}")),
        }
    }
    match worst_relative(rows.into_iter()) {
        Some((r, m, e)) => CheckReport::new(name, m, e, tolerance, format!("worst of {} radii at r = {r}", radii.len())),
        None => CheckReport::failed(name, "no radii"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SuiteOptions {
    /// A reduced suite on coarse grids.
    pub quick: bool,
    /// Adds the regularized (`λ → 0`) and Example 2 checks.
    pub example2: bool,
}

/// The validation suite.
pub fn run_suite(options: SuiteOptions) -> Vec<CheckReport> {
    let mut out = Vec::new();
    let (nk, nr) = if options.quick { (12, 60) } else { (50, 400) };
    let ks = crate::log_grid(0.1, 10.0, nk);
    for s in [0.3, 0.6, 0.9] {
        out.push(check_constant_order_identity(s, &ks, 1e-6));
    }
    out.extend(check_classical_limit(&crate::log_grid(0.5, 5.0, 4), &crate::log_grid(0.01, 100.0, nr)));
    out.push(check_example1_monotonicity(&crate::log_grid(1e-6, 1e6, nr)));
    out.push(check_example1_derivative(&crate::log_grid(0.01, 100.0, nr / 2)));
    out.extend(check_example1_asymptotics());
    out.push(check_example1_positivity(&crate::log_grid(0.05, 20.0, if options.quick { 20 } else { 100 })));
    if !options.quick {
        out.extend(check_asymptotic_slopes(&make_example1(), (0.01, 0.02), (50.0, 100.0)));
        out.push(check_truncation_bound(&make_example1(), 5.0, 0.0, &[50, 100, 200]));
        match build_table(&make_example1(), 1e-3, 12.0, 20) {
            Ok(table) => {
                out.extend(check_inversion(&make_example1(), &table, 1e-3));
                out.push(check_spectral_vs_direct(&make_example1(), &table, &crate::log_grid(0.5, 5.0, 10), 1e-3));
            }
            Err(e) => out.push(CheckReport::failed("example 1 symbol table", e)),
        }
    }
    if options.example2 {
        for s in [1.1, 1.3] {
            let mut r = check_constant_order_identity(s, &[1.0, 2.0, 5.0], 1e-3);
            r.name = format!("regularized identity s = {s}");
            out.push(r);
        }
        let ex2 = make_example2();
        out.extend(check_period_estimate(&ex2, 5.0, 0.1, &[50, 100, 200, 400], 0.05));
        out.push(check_delta_maximum_scaling(&ex2, &[(5.0, 0.05), (5.0, 0.1), (10.0, 0.05), (10.0, 0.1)], 0.2));
        out.push(check_truncation_bound(&ex2, 5.0, 0.1, &[50, 100, 200]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_verdicts() {
        assert!(CheckReport::new("a", 1.0 + 1e-7, 1.0, 1e-6, "").passed);
        assert!(!CheckReport::new("a", 1.1, 1.0, 1e-6, "").passed);
        assert!(CheckReport::count("c", 0, 10, "").passed);
        assert!(!CheckReport::count("c", 1, 10, "").passed);
        assert!(CheckReport::ratio_bound("r", 1.9, 2.0, "").passed);
        assert!(!CheckReport::ratio_bound("r", 2.1, 2.0, "").passed);
        assert!(CheckReport::relative_l2("l", &[1.0, 2.0], &[1.0, 2.0 + 1e-5], 1e-3).passed);
        assert!(!CheckReport::relative_l2("l", &[1.0, 3.0], &[1.0, 2.0], 1e-3).passed);
        assert!(!CheckReport::failed("f", "boom").passed);
    }

    #[test]
    fn slope_fit_recovers_power() {
        let xs = crate::log_grid(1.0, 100.0, 9);
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-1.3)).collect();
        assert!((fit_loglog_slope(&xs, &ys) + 1.3).abs() < 1e-12);
    }

    #[test]
    fn classical_checks() {
        let [g, s] = check_classical_limit(&[1.0, 2.0], &[0.01, 1.0, 10.0, 100.0]);
        assert!(g.passed, "{g:?}");
        assert!(s.passed, "{s:?}");
        let unit = ExponentProfile::constant(1.0, 3);
        let half = green_function(&unit, 2.0).unwrap().phi_value / green_function(&unit, 1.0).unwrap().phi_value;
        assert!((half - 0.5).abs() < 1e-15);
    }

    #[test]
    fn direct_oracle_newtonian_far_field() {
        let unit = ExponentProfile::constant(1.0, 3);
        let narrow = GaussianSource::new(0.05, 2.0).unwrap();
        let v = direct_convolution_oracle(&unit, &narrow, 3.0).unwrap();
        assert!(((v - 2.0 / (12.0 * PI)) / v).abs() < 1e-8, "{v}");
        let zero = GaussianSource::new(1.0, 0.0).unwrap();
        assert_eq!(direct_convolution_oracle(&unit, &zero, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn example1_lemma_checks() {
        assert!(check_example1_monotonicity(&crate::log_grid(1e-6, 1e6, 200)).passed);
        assert!(check_example1_derivative(&crate::log_grid(0.01, 100.0, 50)).passed);
        for r in check_example1_asymptotics() {
            assert!(r.passed, "{r:?}");
        }
    }
}
