//! Radial fields, the sampled symbol `K̂(k)`, and the spectral operators.
//!
//! In three dimensions a radial field and its Fourier transform are related
//! by the pair
//!
//! ```text
//! F(k) = (4π/k) ∫₀^∞ r f(r) sin(kr) dr,     f(r) = 1/(2π² r) ∫₀^∞ k F(k) sin(kr) dk.
//! ```
//!
//! The operator divides the transform by `K̂`, the Riesz potential multiplies
//! by it, and the Poisson solution is minus the Riesz potential. Fields carry
//! power-law exponents for their behaviour below the first and beyond the
//! last sample so that transforms of slowly decaying fields are summed to
//! infinity rather than truncated.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::accel::richardson_to_zero;
use crate::error::{Error, Result};
use crate::exponent::ExponentProfile;
use crate::interp::CubicHermite;
use crate::oscillatory::{sine_integral, SineIntegralOptions};
use crate::quadrature::{integrate, integrate_graded_to_origin, QuadratureOptions};
use crate::sinexform::{LambdaScaling, RegularizationPolicy};

/// Symbol values below this are treated as a breakdown of the table.
pub const SYMBOL_FLOOR: f64 = 1e-14;

/// A radial function given in closed form.
pub trait RadialFunction {
    fn value(&self, r: f64) -> f64;

    /// Closed-form three-dimensional transform, when known.
    fn transform(&self, _k: f64) -> Option<f64> {
        None
    }

    /// Radius beyond which the function is negligible.
    fn extent(&self) -> f64;
}

/// Normalised Gaussian `M (2π σ²)^(−3/2) e^{−r²/(2σ²)}` with transform
/// `M e^{−k²σ²/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianSource {
    pub sigma: f64,
    pub mass: f64,
}

impl GaussianSource {
    pub fn new(sigma: f64, mass: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::domain("GaussianSource", sigma, "sigma > 0"));
        }
        if !mass.is_finite() {
            return Err(Error::domain("GaussianSource", mass, "finite mass"));
        }
        Ok(Self { sigma, mass })
    }
}

impl RadialFunction for GaussianSource {
    fn value(&self, r: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        self.mass * (2.0 * PI * s2).powf(-1.5) * (-0.5 * r * r / s2).exp()
    }

    fn transform(&self, k: f64) -> Option<f64> {
        Some(self.mass * (-0.5 * k * k * self.sigma * self.sigma).exp())
    }

    fn extent(&self) -> f64 {
        // e^{-x²/2} < 1e-22 beyond x = 10
        10.0 * self.sigma
    }
}

/// Plummer density `3M/(4π a³) (1 + r²/a²)^(−5/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlummerSource {
    pub a: f64,
    pub mass: f64,
}

impl PlummerSource {
    pub fn new(a: f64, mass: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::domain("PlummerSource", a, "a > 0"));
        }
        if !mass.is_finite() {
            return Err(Error::domain("PlummerSource", mass, "finite mass"));
        }
        Ok(Self { a, mass })
    }
}

impl RadialFunction for PlummerSource {
    fn value(&self, r: f64) -> f64 {
        let q = r / self.a;
        3.0 * self.mass / (4.0 * PI * self.a.powi(3)) * (1.0 + q * q).powf(-2.5)
    }

    fn extent(&self) -> f64 {
        1e4 * self.a
    }
}

/// A radial function sampled on an increasing grid of positive abscissae.
///
/// Between samples the values are interpolated by a cubic in `ln x`.
/// Below the first sample the field continues as `v₀ (x/x₀)^head`; beyond
/// the last one as `v_N (x/x_N)^tail` when a tail exponent is set and as
/// zero otherwise.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "FieldData"))]
pub struct RadialField {
    grid: Vec<f64>,
    values: Vec<f64>,
    tail_exponent: Option<f64>,
    head_exponent: f64,
    #[cfg_attr(feature = "serde", serde(skip))]
    interp: Option<CubicHermite>,
}

/// Serialized form of a [`RadialField`]; the interpolant is rebuilt.
#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
struct FieldData {
    grid: Vec<f64>,
    values: Vec<f64>,
    tail_exponent: Option<f64>,
    head_exponent: f64,
}

#[cfg(feature = "serde")]
impl TryFrom<FieldData> for RadialField {
    type Error = Error;
    fn try_from(d: FieldData) -> Result<Self> {
        Ok(RadialField::new(d.grid, d.values)?.with_head(d.head_exponent).with_tail(d.tail_exponent))
    }
}

/// Cubic in `ln x`; a power-law tail `x^b` is joined with matching slope.
fn field_interp(grid: &[f64], values: &[f64], tail: Option<f64>) -> Option<CubicHermite> {
    if grid.len() < 2 {
        return None;
    }
    let mut c = CubicHermite::smooth(grid.iter().map(|x| x.ln()).collect(), values.to_vec()).ok()?;
    if let Some(b) = tail {
        c.set_end_slope(b * values[values.len() - 1]);
    }
    Some(c)
}

impl RadialField {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Grid("grid and values differ in length"));
        }
        if grid.is_empty() {
            return Err(Error::Grid("a field needs at least one sample"));
        }
        if grid.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::Grid("grid points must be positive and finite"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Grid("grid must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("field values must be finite"));
        }
        let interp = field_interp(&grid, &values, None);
        Ok(Self {
            grid,
            values,
            tail_exponent: None,
            head_exponent: 0.0,
            interp,
        })
    }

    /// Samples `f` on `grid`; the field is taken to vanish beyond the grid.
    pub fn sample<F: RadialFunction + ?Sized>(f: &F, grid: &[f64]) -> Result<Self> {
        Self::new(grid.to_vec(), grid.iter().map(|&r| f.value(r)).collect())
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: &[f64], f: F) -> Result<Self> {
        Self::new(grid.to_vec(), grid.iter().map(|&r| f(r)).collect())
    }

    pub fn zeros(grid: &[f64]) -> Result<Self> {
        Self::new(grid.to_vec(), alloc::vec![0.0; grid.len()])
    }

    pub fn with_tail(mut self, exponent: Option<f64>) -> Self {
        if exponent != self.tail_exponent {
            self.tail_exponent = exponent;
            self.interp = field_interp(&self.grid, &self.values, exponent);
        }
        self
    }

    pub fn with_head(mut self, exponent: f64) -> Self {
        self.head_exponent = exponent;
        self
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail_exponent(&self) -> Option<f64> {
        self.tail_exponent
    }

    pub fn head_exponent(&self) -> f64 {
        self.head_exponent
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn x_max(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Value at `x > 0`, including the head and tail continuations.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.grid.len();
        if x < self.grid[0] {
            let x0 = self.grid[0];
            let power = (x / x0).powf(self.head_exponent);
            // A regular origin continues as f₀ + c (x² − x₀²), matched in
            // value and slope.
            return match &self.interp {
                Some(c) if is_regular_exponent(self.head_exponent) => {
                    let f0 = self.values[0];
                    let b = 0.5 * (c.slopes()[0] - self.head_exponent * f0);
                    power * (f0 + b * ((x / x0) * (x / x0) - 1.0))
                }
                _ => self.values[0] * power,
            };
        }
        if x > self.grid[n - 1] {
            return match self.tail_exponent {
                Some(b) => self.values[n - 1] * (x / self.grid[n - 1]).powf(b),
                None => 0.0,
            };
        }
        match &self.interp {
            Some(c) => c.eval(x.ln()),
            None => self.values[0],
        }
    }

    /// Pointwise linear combination `a·self + b·other` on a common grid.
    pub fn combine(&self, a: f64, other: &RadialField, b: f64) -> Result<RadialField> {
        if self.grid != other.grid {
            return Err(Error::Grid("fields are sampled on different grids"));
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        let tail = match (self.tail_exponent, other.tail_exponent) {
            (Some(p), Some(q)) => Some(p.max(q)),
            (p, q) => p.or(q),
        };
        Ok(RadialField::new(self.grid.clone(), values)?
            .with_tail(tail)
            .with_head(self.head_exponent.min(other.head_exponent)))
    }

    pub fn scaled(&self, a: f64) -> RadialField {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= a);
        out.interp = field_interp(&out.grid, &out.values, out.tail_exponent);
        out
    }

    /// Smallest sample radius beyond which every sample is below
    /// `cutoff·max|f|`; the last radius when there is a tail.
    pub fn effective_support(&self, cutoff: f64) -> f64 {
        if self.tail_exponent.is_some() {
            return f64::INFINITY;
        }
        let threshold = cutoff * self.max_abs();
        let mut end = self.x_min();
        for (x, v) in self.grid.iter().zip(&self.values).rev() {
            if v.abs() > threshold {
                end = *x;
                break;
            }
        }
        // one more sample keeps the interpolant's last interval
        let idx = self.grid.partition_point(|g| *g <= end);
        self.grid.get(idx).copied().unwrap_or(self.x_max())
    }
}

/// Relative discrete L² distance `‖a − b‖ / ‖b‖` over paired samples.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let (num, den) = a
        .iter()
        .zip(b)
        .fold((0.0, 0.0), |(n, d), (x, y)| (n + (x - y) * (x - y), d + y * y));
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (num / den).sqrt()
    }
}

/// Sampled `K̂(k)` with log–log monotone cubic interpolation and power-law
/// continuation: `k^(−2 s(∞))` below the table and `k^(−2 s(0))` above it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "TableData"))]
pub struct SpectralTable {
    profile: ExponentProfile,
    policy: RegularizationPolicy,
    k_grid: Vec<f64>,
    khat_values: Vec<f64>,
    small_k_exponent: f64,
    large_k_exponent: f64,
    /// Wavenumbers within this factor of the table ends may be extrapolated.
    extrapolation_factor: f64,
    #[cfg_attr(feature = "serde", serde(skip))]
    interp: Option<CubicHermite>,
}

#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
struct TableData {
    profile: ExponentProfile,
    policy: RegularizationPolicy,
    k_grid: Vec<f64>,
    khat_values: Vec<f64>,
    extrapolation_factor: f64,
}

#[cfg(feature = "serde")]
impl TryFrom<TableData> for SpectralTable {
    type Error = Error;
    fn try_from(d: TableData) -> Result<Self> {
        Ok(SpectralTable::new(&d.profile, d.policy, d.k_grid, d.khat_values)?.with_extrapolation_factor(d.extrapolation_factor))
    }
}

impl SpectralTable {
    pub fn new(profile: &ExponentProfile, policy: RegularizationPolicy, k_grid: Vec<f64>, khat_values: Vec<f64>) -> Result<Self> {
        if k_grid.len() != khat_values.len() {
            return Err(Error::Grid("wavenumbers and symbol values differ in length"));
        }
        if k_grid.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
            return Err(Error::Grid("wavenumbers must be positive and finite"));
        }
        if k_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Grid("wavenumbers must be strictly increasing"));
        }
        if let Some((k, v)) = k_grid.iter().zip(&khat_values).find(|(_, v)| !(**v > SYMBOL_FLOOR && v.is_finite())) {
            return Err(Error::SymbolFloor { k: *k, value: *v });
        }
        let interp = build_log_interp(&k_grid, &khat_values)?;
        Ok(Self {
            small_k_exponent: -2.0 * profile.s_at_infinity(),
            large_k_exponent: -2.0 * profile.s_at_zero(),
            profile: profile.clone(),
            policy,
            k_grid,
            khat_values,
            extrapolation_factor: 4.0,
            interp,
        })
    }

    pub fn with_extrapolation_factor(mut self, factor: f64) -> Self {
        self.extrapolation_factor = factor.max(1.0);
        self
    }

    pub fn profile(&self) -> &ExponentProfile {
        &self.profile
    }

    pub fn policy(&self) -> &RegularizationPolicy {
        &self.policy
    }

    pub fn k_grid(&self) -> &[f64] {
        &self.k_grid
    }

    pub fn values(&self) -> &[f64] {
        &self.khat_values
    }

    pub fn len(&self) -> usize {
        self.k_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_grid.is_empty()
    }

    pub fn extrapolation_factor(&self) -> f64 {
        self.extrapolation_factor
    }

    fn range_error(&self, k: f64) -> Error {
        Error::TableRange {
            k,
            k_min: self.k_grid.first().copied().unwrap_or(f64::NAN),
            k_max: self.k_grid.last().copied().unwrap_or(f64::NAN),
        }
    }

    /// Fails unless `[k_lo, k_hi]` lies within the extrapolation factor of
    /// the table ends.
    pub fn check_coverage(&self, k_lo: f64, k_hi: f64) -> Result<()> {
        if self.k_grid.len() < 2 {
            return Err(self.range_error(k_lo));
        }
        let (lo, hi) = (self.k_grid[0], self.k_grid[self.k_grid.len() - 1]);
        if k_lo * self.extrapolation_factor < lo {
            return Err(self.range_error(k_lo));
        }
        if k_hi > hi * self.extrapolation_factor {
            return Err(self.range_error(k_hi));
        }
        Ok(())
    }

    /// `K̂(k)` with the coverage and floor checks.
    pub fn eval(&self, k: f64) -> Result<f64> {
        self.check_coverage(k, k)?;
        let v = self.eval_unchecked(k);
        if !(v > SYMBOL_FLOOR) {
            return Err(Error::SymbolFloor { k, value: v });
        }
        Ok(v)
    }

    /// `K̂(k)` for any `k > 0`, using the power-law continuations outside.
    pub fn eval_unchecked(&self, k: f64) -> f64 {
        let n = self.k_grid.len();
        if n == 0 {
            return f64::NAN;
        }
        if k < self.k_grid[0] {
            return self.khat_values[0] * (k / self.k_grid[0]).powf(self.small_k_exponent);
        }
        if k > self.k_grid[n - 1] {
            return self.khat_values[n - 1] * (k / self.k_grid[n - 1]).powf(self.large_k_exponent);
        }
        match &self.interp {
            Some(c) => c.eval(k.ln()).exp(),
            None => self.khat_values[0],
        }
    }

    pub fn small_k_exponent(&self) -> f64 {
        self.small_k_exponent
    }

    pub fn large_k_exponent(&self) -> f64 {
        self.large_k_exponent
    }
}

fn build_log_interp(k: &[f64], v: &[f64]) -> Result<Option<CubicHermite>> {
    if k.len() < 2 {
        return Ok(None);
    }
    Ok(Some(CubicHermite::monotone(
        k.iter().map(|x| x.ln()).collect(),
        v.iter().map(|x| x.ln()).collect(),
    )?))
}

/// Log-spaced `count` wavenumbers on `[0.5/r_max, 20/r_min]`.
pub fn default_k_grid(r_min: f64, r_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(Error::Grid("need 0 < r_min < r_max"));
    }
    Ok(crate::log_grid(0.5 / r_max, 20.0 / r_min, count))
}

/// Wavenumbers for a symbol table serving fields on `[r_min, r_max]`.
///
/// The inverse transform integrates down to `k = 0`, so the table reaches
/// three decades below the field grid; there the continuation `k^(−2s(∞))`
/// is accurate enough for the small remaining weight.
pub fn default_table_grid(r_min: f64, r_max: f64, per_decade: usize) -> Result<Vec<f64>> {
    let base = default_k_grid(r_min, r_max, 2)?;
    let (lo, hi) = (base[0] * 1e-3, base[1]);
    let decades = (hi / lo).log10();
    let count = ((decades * per_decade as f64).ceil() as usize).max(2) + 1;
    Ok(crate::log_grid(lo, hi, count))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TransformOptions {
    /// Relative accuracy of each sine integral.
    pub rel_tol: f64,
    /// Transform samples below this fraction of the largest one end a
    /// band-limited spectrum.
    pub band_limit: f64,
    /// Field samples below this fraction of the largest one are treated as
    /// zero beyond the last larger sample.
    pub support_cutoff: f64,
    /// Density of the adaptive wavenumber grid at small `k`.
    pub points_per_decade: usize,
    /// Samples per oscillation period `2π/R` of the transform of a field
    /// supported on `[0, R]`, at large `k`.
    pub points_per_period: usize,
    /// Explicit wavenumber range; defaults to `[0.005/r_max, 20/r_min]`.
    pub k_range: Option<(f64, f64)>,
    /// Used for integrands decaying too slowly to converge; defaults to
    /// the standard sequence scaled by the frequency.
    pub regularization: Option<RegularizationPolicy>,
    pub period_budget: usize,
}

impl Default for TransformOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            band_limit: 1e-13,
            support_cutoff: 1e-18,
            points_per_decade: 32,
            points_per_period: 16,
            k_range: None,
            regularization: None,
            period_budget: 100_000,
        }
    }
}

/// A function on `(0, ∞)` that can be transformed: samples plus power-law
/// continuations.
trait Transformable {
    fn value(&self, x: f64) -> f64;
    /// Exponent of the behaviour beyond the samples; `None` for zero.
    fn tail(&self) -> Option<f64>;
    /// Integrand support when there is no tail.
    fn support(&self) -> f64;
    fn x_max(&self) -> f64;
    /// Scale of `|x f(x)|` used for absolute tolerances.
    fn moment_scale(&self) -> f64;
    /// Points where the interpolated data are only C¹, increasing, from
    /// the first sample to `x_max`.
    fn breakpoints(&self) -> Vec<f64>;
}

struct FieldView<'a> {
    field: &'a RadialField,
    support: f64,
}

impl Transformable for FieldView<'_> {
    fn value(&self, x: f64) -> f64 {
        self.field.eval(x)
    }
    fn tail(&self) -> Option<f64> {
        self.field.tail_exponent
    }
    fn support(&self) -> f64 {
        self.support
    }
    fn x_max(&self) -> f64 {
        self.field.x_max()
    }
    fn moment_scale(&self) -> f64 {
        self.field
            .grid
            .iter()
            .zip(&self.field.values)
            .fold(0.0, |m, (x, v)| m.max((x * v).abs()))
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.field.grid.clone()
    }
}

/// The spectrum `F(k) K̂(k)^power`.
struct SymbolProduct<'a> {
    spectrum: &'a RadialField,
    table: &'a SpectralTable,
    power: f64,
    support: f64,
}

impl Transformable for SymbolProduct<'_> {
    fn value(&self, k: f64) -> f64 {
        let f = self.spectrum.eval(k);
        if f == 0.0 {
            return 0.0;
        }
        f * self.table.eval_unchecked(k).powf(self.power)
    }
    fn tail(&self) -> Option<f64> {
        self.spectrum.tail_exponent.map(|t| t + self.power * self.table.large_k_exponent)
    }
    fn support(&self) -> f64 {
        self.support
    }
    fn x_max(&self) -> f64 {
        self.spectrum.x_max()
    }
    fn moment_scale(&self) -> f64 {
        self.spectrum
            .grid
            .iter()
            .zip(&self.spectrum.values)
            .fold(0.0, |m, (k, v)| m.max((k * v * self.table.eval_unchecked(*k).powf(self.power)).abs()))
    }
    fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = (self.spectrum.x_min(), self.spectrum.x_max());
        let mut out = self.spectrum.grid.clone();
        out.extend(self.table.k_grid.iter().copied().filter(|&k| k > lo && k < hi));
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// `∫₀^∞ x f(x) sin(ωx) dx`. A tail too slow to converge is
/// Abel-regularized by `e^{−λ(x − x_max)}` beyond the last sample, which
/// leaves the finite part undamped and the tail analytic in `λ` on a disc
/// of radius `ω`.
fn sine_moment<T: Transformable>(f: &T, omega: f64, opts: &TransformOptions) -> Result<f64> {
    let nodes = f.breakpoints();
    let abs_tol = 1e-2 * opts.rel_tol * f.moment_scale() * PI / omega;
    let finite = finite_moment(f, &nodes, omega, abs_tol)?;
    let Some(tail) = f.tail() else { return Ok(finite) };
    if tail < -1.0 {
        return Ok(finite + tail_moment(f, omega, 0.0, abs_tol.max(opts.rel_tol * finite.abs()), opts)?);
    }
    let policy = opts
        .regularization
        .clone()
        .unwrap_or_else(|| RegularizationPolicy::default().with_scaling(LambdaScaling::RelativeToK));
    policy.validate()?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &entry in &policy.lambda_sequence {
        let damping = policy.damping(entry, omega);
        xs.push(damping);
        ys.push(tail_moment(f, omega, damping, abs_tol.max(opts.rel_tol * finite.abs()), opts)?);
    }
    Ok(finite + richardson_to_zero(&xs, &ys).value)
}

fn moment_quadrature(abs_tol: f64) -> QuadratureOptions {
    QuadratureOptions::default()
        .with_rel_tol(1e-13)
        .with_abs_tol(abs_tol)
        .with_max_subintervals(1000)
}

/// `∫₀^{x_max} x f(x) sin(ωx) dx` (up to the support for untailed fields):
/// graded quadrature below the first node and one adaptive rule per node
/// interval.
fn finite_moment<T: Transformable>(f: &T, nodes: &[f64], omega: f64, abs_tol: f64) -> Result<f64> {
    let h = |x: f64| x * f.value(x) * (omega * x).sin();
    let q = moment_quadrature(abs_tol / nodes.len() as f64);
    let x_max = f.x_max();
    let end = if f.tail().is_none() { f.support().min(x_max) } else { x_max };
    let mut total = integrate_graded_to_origin(&h, nodes[0].min(end), &q)?.value;
    for w in nodes.windows(2) {
        let b = w[1].min(end);
        if b <= w[0] {
            break;
        }
        total += integrate(&h, w[0], b, &q)?.value;
    }
    Ok(total)
}

/// `∫_{x_max}^∞ e^{−λ(x − x_max)} x f(x) sin(ωx) dx` by half-period summation.
fn tail_moment<T: Transformable>(f: &T, omega: f64, lambda: f64, abs_tol: f64, opts: &TransformOptions) -> Result<f64> {
    let g = |x: f64| x * f.value(x);
    let x_max = f.x_max();
    let tail = SineIntegralOptions {
        damping: lambda,
        rel_tol: opts.rel_tol,
        abs_tol,
        max_periods: opts.period_budget,
        accelerate_from: x_max,
        start: x_max,
        singular_origin: false,
        quadrature: moment_quadrature(abs_tol),
        ..Default::default()
    };
    Ok(sine_integral(&g, omega, &tail)?.value)
}

/// `x^e` is smooth and even at the origin.
fn is_regular_exponent(x: f64) -> bool {
    x > -1e-9 && (x - 2.0 * (0.5 * x).round()).abs() < 1e-9
}

/// Summary of a spectral operation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectralDiagnostics {
    pub k_points: usize,
    pub k_min: f64,
    pub k_max: f64,
    /// The spectrum fell below the band limit before the end of the range.
    pub band_limited: bool,
    /// Power-law exponent of the transformed symbol product at large `k`.
    pub spectrum_tail_exponent: Option<f64>,
    /// Set when that product grows faster than `k²`, i.e. the field is too
    /// rough for the operator.
    pub rough: bool,
}

/// Forward transform on an explicit wavenumber grid.
pub fn forward_transform_on(field: &RadialField, k_grid: &[f64], opts: &TransformOptions) -> Result<RadialField> {
    if k_grid.is_empty() {
        return Err(Error::Grid("empty wavenumber grid"));
    }
    let support = field.effective_support(opts.support_cutoff);
    let view = FieldView { field, support };
    let values = if field.is_zero() {
        alloc::vec![0.0; k_grid.len()]
    } else {
        k_grid
            .iter()
            .map(|&k| Ok(4.0 * PI / k * sine_moment(&view, k, opts)?))
            .collect::<Result<Vec<f64>>>()?
    };
    let out = RadialField::new(k_grid.to_vec(), values)?;
    let head = spectrum_head(field, &out);
    let tail = (!is_regular_exponent(field.head_exponent)).then(|| -3.0 - field.head_exponent);
    Ok(out.with_head(head).with_tail(tail))
}

/// Small-`k` exponent of a transform: the singular term `k^(−3−b)` from a
/// real-space tail `r^b`, or a regular constant, whichever the samples show.
fn spectrum_head(field: &RadialField, spectrum: &RadialField) -> f64 {
    match field.tail_exponent {
        None => 0.0,
        Some(b) if b > -3.0 => -3.0 - b,
        Some(b) => {
            let singular = -3.0 - b;
            if spectrum.len() < 2 || spectrum.values[0] == 0.0 || spectrum.values[1] == 0.0 {
                return 0.0;
            }
            let measured = (spectrum.values[1] / spectrum.values[0]).abs().ln() / (spectrum.grid[1] / spectrum.grid[0]).ln();
            if (measured - singular).abs() < measured.abs() {
                singular
            } else {
                0.0
            }
        }
    }
}

/// Forward transform on an adaptive wavenumber grid.
///
/// The grid is logarithmic at small `k` and becomes uniform, with spacing
/// resolving oscillations of period `2π/R` for a field supported on
/// `[0, R]`, at large `k`. For fields with a regular origin the grid ends
/// once the transform has fallen below the band limit.
pub fn forward_transform(field: &RadialField, opts: &TransformOptions) -> Result<RadialField> {
    forward_transform_with_diagnostics(field, opts).map(|(f, _)| f)
}

pub fn forward_transform_with_diagnostics(field: &RadialField, opts: &TransformOptions) -> Result<(RadialField, SpectralDiagnostics)> {
    let (k_lo, k_hi) = match opts.k_range {
        Some(r) => r,
        None => {
            let g = default_k_grid(field.x_min(), field.x_max().max(field.x_min() * 2.0), 2)?;
            (1e-2 * g[0], g[1])
        }
    };
    if !(k_lo > 0.0 && k_hi > k_lo) {
        return Err(Error::Grid("need 0 < k_min < k_max"));
    }
    let support = field.effective_support(opts.support_cutoff);
    let view = FieldView { field, support };
    let regular_origin = is_regular_exponent(field.head_exponent);
    // A tail joins the samples at x_max, which shows up in the transform as
    // an oscillation of period 2π/x_max.
    let r_osc = if support.is_finite() { support } else { field.x_max() };
    let du = core::f64::consts::LN_10 / opts.points_per_decade.max(4) as f64;
    let window = opts.points_per_decade.max(4);
    let dk_lin = 2.0 * PI / (opts.points_per_period.max(4) as f64 * r_osc);

    let mut ks = Vec::new();
    let mut vs: Vec<f64> = Vec::new();
    let mut k = k_lo;
    let mut peak = 0.0f64;
    let mut band_limited = false;
    let zero = field.is_zero();
    loop {
        let kk = k.min(k_hi);
        let v = if zero { 0.0 } else { 4.0 * PI / kk * sine_moment(&view, kk, opts)? };
        ks.push(kk);
        vs.push(v);
        peak = peak.max(v.abs());
        if kk >= k_hi {
            break;
        }
        if regular_origin && vs.len() > window {
            let recent = vs[vs.len() - window..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if recent <= opts.band_limit * peak {
                band_limited = true;
                break;
            }
        }
        // logarithmic steps at small k, uniform steps 2π/(m R) at large k
        k *= (1.0 / (1.0 / du + k / dk_lin)).exp();
    }
    if zero {
        band_limited = true;
    }
    let out = RadialField::new(ks, vs)?;
    let head = spectrum_head(field, &out);
    let tail = (!regular_origin).then(|| -3.0 - field.head_exponent);
    let out = out.with_head(head).with_tail(tail);
    let diag = SpectralDiagnostics {
        k_points: out.len(),
        k_min: out.x_min(),
        k_max: out.x_max(),
        band_limited,
        spectrum_tail_exponent: tail,
        rough: false,
    };
    Ok((out, diag))
}

fn inverse_of<T: Transformable>(spec: &T, head: f64, r_grid: &[f64], opts: &TransformOptions) -> Result<RadialField> {
    if head <= -3.0 {
        return Err(Error::Invalid("spectrum is too singular at k = 0 for an inverse transform"));
    }
    let values = r_grid
        .iter()
        .map(|&r| Ok(sine_moment(spec, r, opts)? / (2.0 * PI * PI * r)))
        .collect::<Result<Vec<f64>>>()?;
    let tail = (!is_regular_exponent(head)).then(|| -3.0 - head);
    let real_head = spec.tail().map_or(0.0, |t| -3.0 - t);
    Ok(RadialField::new(r_grid.to_vec(), values)?.with_tail(tail).with_head(real_head))
}

/// Inverse transform of a `k`-space field, evaluated on `r_grid`.
pub fn inverse_transform(spectrum: &RadialField, r_grid: &[f64], opts: &TransformOptions) -> Result<RadialField> {
    check_grid(r_grid)?;
    if spectrum.is_zero() {
        return RadialField::zeros(r_grid);
    }
    let view = FieldView {
        field: spectrum,
        support: spectrum.effective_support(opts.support_cutoff),
    };
    inverse_of(&view, spectrum.head_exponent, r_grid, opts)
}

fn check_grid(r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() {
        return Err(Error::Grid("empty radial grid"));
    }
    if r_grid.iter().any(|r| !(*r > 0.0 && r.is_finite())) || r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid("radial grid must be positive and strictly increasing"));
    }
    Ok(())
}

/// `F⁻¹[K̂^power · F[f]]` on the grid of `field`.
fn apply_symbol(
    profile: &ExponentProfile,
    field: &RadialField,
    table: &SpectralTable,
    power: f64,
    opts: &TransformOptions,
) -> Result<(RadialField, SpectralDiagnostics)> {
    if table.profile() != profile {
        return Err(Error::TableMismatch);
    }
    if field.is_zero() {
        let diag = SpectralDiagnostics {
            k_points: 0,
            k_min: 0.0,
            k_max: 0.0,
            band_limited: true,
            spectrum_tail_exponent: None,
            rough: false,
        };
        return Ok((RadialField::zeros(field.grid())?, diag));
    }
    let (spectrum, mut diag) = forward_transform_with_diagnostics(field, opts)?;
    table.check_coverage(spectrum.x_min(), spectrum.x_max())?;
    for &k in spectrum.grid() {
        let v = table.eval_unchecked(k);
        if !(v > SYMBOL_FLOOR) {
            return Err(Error::SymbolFloor { k, value: v });
        }
    }
    let product = SymbolProduct {
        spectrum: &spectrum,
        table,
        power,
        support: spectrum.effective_support(opts.support_cutoff),
    };
    let head = spectrum.head_exponent + power * table.small_k_exponent;
    let out = inverse_of(&product, head, field.grid(), opts)?;
    diag.spectrum_tail_exponent = product.tail();
    diag.rough = product.tail().is_some_and(|t| t > 2.0);
    Ok((out, diag))
}

/// The variable-order fractional Laplacian: `F⁻¹[F[f] / K̂]`.
pub fn apply_vofl(profile: &ExponentProfile, field: &RadialField, table: &SpectralTable) -> Result<RadialField> {
    apply_vofl_with(profile, field, table, &TransformOptions::default()).map(|(f, _)| f)
}

pub fn apply_vofl_with(
    profile: &ExponentProfile,
    field: &RadialField,
    table: &SpectralTable,
    opts: &TransformOptions,
) -> Result<(RadialField, SpectralDiagnostics)> {
    apply_symbol(profile, field, table, -1.0, opts)
}

/// The variable-order Riesz potential `K ⋆ f`, computed as `F⁻¹[K̂ F[f]]`.
pub fn riesz_apply(profile: &ExponentProfile, field: &RadialField, table: &SpectralTable) -> Result<RadialField> {
    riesz_apply_with(profile, field, table, &TransformOptions::default()).map(|(f, _)| f)
}

pub fn riesz_apply_with(
    profile: &ExponentProfile,
    field: &RadialField,
    table: &SpectralTable,
    opts: &TransformOptions,
) -> Result<(RadialField, SpectralDiagnostics)> {
    apply_symbol(profile, field, table, 1.0, opts)
}

/// Solution `f = Φ ⋆ g = −K ⋆ g` of the variable-order Poisson equation
/// with source `g`.
pub fn solve_poisson(profile: &ExponentProfile, source: &RadialField, table: &SpectralTable) -> Result<RadialField> {
    solve_poisson_with(profile, source, table, &TransformOptions::default()).map(|s| s.solution)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSolution {
    pub solution: RadialField,
    pub diagnostics: SpectralDiagnostics,
}

pub fn solve_poisson_with(
    profile: &ExponentProfile,
    source: &RadialField,
    table: &SpectralTable,
    opts: &TransformOptions,
) -> Result<PoissonSolution> {
    let (potential, diagnostics) = riesz_apply_with(profile, source, table, opts)?;
    Ok(PoissonSolution {
        solution: potential.scaled(-1.0),
        diagnostics,
    })
}

/// Relative L² norm of `(−Δ)^{s(·)} f + g` over the samples of `g` for a
/// solution `f` of the Poisson equation.
pub fn poisson_residual(
    profile: &ExponentProfile,
    solution: &RadialField,
    source: &RadialField,
    table: &SpectralTable,
    opts: &TransformOptions,
) -> Result<f64> {
    let (lap, _) = apply_vofl_with(profile, solution, table, opts)?;
    let minus_g: Vec<f64> = source.values().iter().map(|v| -v).collect();
    Ok(relative_l2(lap.values(), &minus_g))
}
