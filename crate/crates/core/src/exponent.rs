//! Radial order profiles `s(r)`.
//!
//! A profile is admissible when `s` is C¹ on `(0, ∞)`, maps into `(0, n/2)`
//! and has limits `s₁ = s(0⁺)` and `s₂ = s(∞)` inside the same interval.
//! Orders depend on `r = |x|` only.

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::interp::CubicHermite;

/// Minimum distance of every order value from the endpoints 0 and n/2.
pub const RANGE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "form", rename_all = "lowercase"))]
pub enum ProfileForm {
    Constant {
        s: f64,
    },
    /// `s(r) = (num0 + num1 r) / (den (1 + r))`.
    Moebius {
        num0: f64,
        num1: f64,
        den: f64,
    },
    Tabulated(TabulatedOrder),
}

/// Order sampled at radii starting from 0, interpolated by a monotone cubic
/// and continued past the last node by `s₂ + A (r_last / r)^m`, with `A` and
/// `m` chosen so the join is C¹.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TabulatedOrder {
    curve: CubicHermite,
    s_at_infinity: f64,
    tail_amplitude: f64,
    tail_power: f64,
}

impl TabulatedOrder {
    pub fn new(radii: Vec<f64>, orders: Vec<f64>, s_at_infinity: f64) -> Result<Self> {
        if radii.first().copied() != Some(0.0) {
            return Err(Error::Grid("tabulated profile must start at r = 0"));
        }
        if !s_at_infinity.is_finite() {
            return Err(Error::Invalid("tail order s(inf) must be finite"));
        }
        let mut curve = CubicHermite::monotone(radii, orders)?;
        let r_last = curve.x_max();
        let s_last = curve.values()[curve.values().len() - 1];
        let amplitude = s_last - s_at_infinity;
        let end_slope = curve.slopes()[curve.slopes().len() - 1];
        let power = if amplitude.abs() < 1e-14 {
            curve.set_end_slope(0.0);
            1.0
        } else {
            let m = -end_slope * r_last / amplitude;
            if m > 0.0 {
                m
            } else {
                curve.set_end_slope(-amplitude / r_last);
                1.0
            }
        };
        Ok(Self {
            curve,
            s_at_infinity,
            tail_amplitude: amplitude,
            tail_power: power,
        })
    }

    pub fn radii(&self) -> &[f64] {
        self.curve.nodes()
    }

    pub fn orders(&self) -> &[f64] {
        self.curve.values()
    }

    fn eval(&self, r: f64) -> f64 {
        let r_last = self.curve.x_max();
        if r <= r_last {
            self.curve.eval(r)
        } else {
            self.s_at_infinity + self.tail_amplitude * (r_last / r).powf(self.tail_power)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExponentProfile {
    n: u32,
    form: ProfileForm,
}

/// `s(r) = (6 + 9r) / (10 (1 + r))` in three dimensions; orders in (0.6, 0.9).
pub fn make_example1() -> ExponentProfile {
    ExponentProfile::moebius(6.0, 9.0, 10.0, 3)
}

/// `s(r) = (11 + 13r) / (10 (1 + r))` in three dimensions; orders in (1.1, 1.3).
pub fn make_example2() -> ExponentProfile {
    ExponentProfile::moebius(11.0, 13.0, 10.0, 3)
}

impl ExponentProfile {
    pub fn new(form: ProfileForm, n: u32) -> Self {
        Self { n, form }
    }

    pub fn constant(s: f64, n: u32) -> Self {
        Self::new(ProfileForm::Constant { s }, n)
    }

    pub fn moebius(num0: f64, num1: f64, den: f64, n: u32) -> Self {
        Self::new(ProfileForm::Moebius { num0, num1, den }, n)
    }

    pub fn tabulated(radii: Vec<f64>, orders: Vec<f64>, s_at_infinity: f64, n: u32) -> Result<Self> {
        Ok(Self::new(
            ProfileForm::Tabulated(TabulatedOrder::new(radii, orders, s_at_infinity)?),
            n,
        ))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn form(&self) -> &ProfileForm {
        &self.form
    }

    pub fn half_dimension(&self) -> f64 {
        0.5 * self.n as f64
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.form, ProfileForm::Constant { .. })
    }

    /// `s(r)` for `r ≥ 0`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::domain("ExponentProfile::eval", r, "r >= 0"));
        }
        Ok(self.order_at(r))
    }

    /// `s(r)` without the domain check; `r = ∞` yields `s₂`.
    pub(crate) fn order_at(&self, r: f64) -> f64 {
        match &self.form {
            ProfileForm::Constant { s } => *s,
            ProfileForm::Moebius { num0, num1, den } => {
                if r.is_infinite() {
                    num1 / den
                } else {
                    (num0 + num1 * r) / (den * (1.0 + r))
                }
            }
            ProfileForm::Tabulated(t) => {
                if r.is_infinite() {
                    t.s_at_infinity
                } else {
                    t.eval(r)
                }
            }
        }
    }

    /// `s₁ = lim_{r→0} s(r)`.
    pub fn s_at_zero(&self) -> f64 {
        self.order_at(0.0)
    }

    /// `s₂ = lim_{r→∞} s(r)`.
    pub fn s_at_infinity(&self) -> f64 {
        self.order_at(f64::INFINITY)
    }

    /// Large-r power of `p(r) = r K(r)`: `a = 1 − n + 2 s₂`.
    pub fn decay_exponent(&self) -> f64 {
        1.0 - self.n as f64 + 2.0 * self.s_at_infinity()
    }

    /// Checks the admissibility hypotheses and reports the limits.
    pub fn validate(&self) -> core::result::Result<ProfileReport, ProfileViolations> {
        let mut violations = Vec::new();
        if self.n == 0 {
            violations.push(Violation::Dimension { n: self.n });
            return Err(ProfileViolations(violations));
        }
        let upper = self.half_dimension();
        if let ProfileForm::Moebius { den, .. } = self.form {
            if den == 0.0 || !den.is_finite() {
                violations.push(Violation::Degenerate("Moebius denominator must be finite and nonzero"));
                return Err(ProfileViolations(violations));
            }
        }
        let inside = |s: f64| s.is_finite() && s >= RANGE_MARGIN && s <= upper - RANGE_MARGIN;

        let s1 = self.s_at_zero();
        let s2 = self.s_at_infinity();
        if !inside(s1) {
            violations.push(Violation::LimitAtZero { s: s1, upper });
        }
        if !inside(s2) {
            violations.push(Violation::LimitAtInfinity { s: s2, upper });
        }

        let mut s_min = f64::INFINITY;
        let mut s_max = f64::NEG_INFINITY;
        let mut first_bad: Option<(f64, f64)> = None;
        for r in self.check_grid() {
            let s = self.order_at(r);
            if !s.is_finite() {
                violations.push(Violation::NotSmooth { r });
                break;
            }
            s_min = s_min.min(s);
            s_max = s_max.max(s);
            if !inside(s) && first_bad.is_none() {
                first_bad = Some((r, s));
            }
        }
        if let Some((r, s)) = first_bad {
            violations.push(Violation::OrderOutOfRange { r, s, upper });
        }

        if violations.is_empty() {
            Ok(ProfileReport {
                n: self.n,
                s_at_zero: s1,
                s_at_infinity: s2,
                decay_exponent: self.decay_exponent(),
                s_min,
                s_max,
            })
        } else {
            Err(ProfileViolations(violations))
        }
    }

    fn check_grid(&self) -> Vec<f64> {
        let mut grid = alloc::vec![0.0];
        grid.extend(crate::log_grid(1e-8, 1e8, 401));
        if let ProfileForm::Tabulated(t) = &self.form {
            let nodes = t.radii();
            grid.extend(nodes.iter().copied());
            grid.extend(nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])));
            grid.sort_by(f64::total_cmp);
        }
        grid
    }
}

impl fmt::Display for ExponentProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.form {
            ProfileForm::Constant { s } => write!(f, "constant(s = {s}; n = {})", self.n),
            ProfileForm::Moebius { num0, num1, den } => {
                write!(f, "moebius({num0}, {num1}, {den}; n = {})", self.n)
            }
            ProfileForm::Tabulated(t) => write!(
                f,
                "tabulated({} nodes, s(inf) = {}; n = {})",
                t.radii().len(),
                t.s_at_infinity,
                self.n
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProfileReport {
    pub n: u32,
    pub s_at_zero: f64,
    pub s_at_infinity: f64,
    pub decay_exponent: f64,
    /// Extreme order values seen on the check grid.
    pub s_min: f64,
    pub s_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Violation {
    Dimension { n: u32 },
    Degenerate(&'static str),
    OrderOutOfRange { r: f64, s: f64, upper: f64 },
    LimitAtZero { s: f64, upper: f64 },
    LimitAtInfinity { s: f64, upper: f64 },
    NotSmooth { r: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Dimension { n } => write!(f, "dimension n = {n}: n must be a positive integer"),
            Violation::Degenerate(what) => write!(f, "degenerate profile: {what}"),
            Violation::OrderOutOfRange { r, s, upper } => write!(
                f,
                "range hypothesis: s(r) must lie in (0, n/2) = (0, {upper}), but s({r}) = {s}"
            ),
            Violation::LimitAtZero { s, upper } => write!(
                f,
                "limit hypothesis at the origin: s1 = lim r->0 s(r) = {s} must lie in (0, {upper})"
            ),
            Violation::LimitAtInfinity { s, upper } => write!(
                f,
                "limit hypothesis at infinity: s2 = lim r->inf s(r) = {s} must lie in (0, {upper})"
            ),
            Violation::NotSmooth { r } => {
                write!(f, "regularity hypothesis: s must be C1, but is not finite at r = {r}")
            }
        }
    }
}

/// Every hypothesis a profile violates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProfileViolations(pub Vec<Violation>);

impl fmt::Display for ProfileViolations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "inadmissible order profile:")?;
        for v in &self.0 {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl From<ProfileViolations> for Error {
    fn from(v: ProfileViolations) -> Self {
        Error::Profile(v)
    }
}
