//! Piecewise cubic Hermite interpolation.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Slope rule used at the nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SlopeRule {
    /// Fritsch–Butland harmonic-mean slopes; preserves monotonicity of the data.
    Monotone,
    /// Three-point (non-uniform) centred differences; third-order accurate.
    Centered,
    /// Slopes of the five-point Lagrange interpolant through each node and
    /// its neighbours; fourth-order accurate on smooth data.
    Smooth,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CubicHermite {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
    rule: SlopeRule,
}

impl CubicHermite {
    pub fn new(x: Vec<f64>, y: Vec<f64>, rule: SlopeRule) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Grid("abscissae and values differ in length"));
        }
        if x.len() < 2 {
            return Err(Error::Grid("at least two nodes are required"));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Grid("non-finite node"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Grid("abscissae must be strictly increasing"));
        }
        let slopes = match rule {
            SlopeRule::Monotone => monotone_slopes(&x, &y),
            SlopeRule::Centered => centered_slopes(&x, &y),
            SlopeRule::Smooth if x.len() >= 5 => lagrange_slopes(&x, &y),
            SlopeRule::Smooth => centered_slopes(&x, &y),
        };
        Ok(Self { x, y, slopes, rule })
    }

    pub fn monotone(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::new(x, y, SlopeRule::Monotone)
    }

    pub fn centered(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::new(x, y, SlopeRule::Centered)
    }

    pub fn smooth(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::new(x, y, SlopeRule::Smooth)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn rule(&self) -> SlopeRule {
        self.rule
    }

    /// Overrides the slope at the last node (used to join a C¹ tail).
    pub fn set_end_slope(&mut self, slope: f64) {
        if let Some(last) = self.slopes.last_mut() {
            *last = slope;
        }
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        let idx = self.x.partition_point(|&xi| xi <= t);
        idx.clamp(1, n - 1) - 1
    }

    /// Value at `t`. Outside the node range the end cubic is continued.
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let u = (t - self.x[i]) / h;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        h00 * self.y[i] + h10 * h * self.slopes[i] + h01 * self.y[i + 1] + h11 * h * self.slopes[i + 1]
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let u = (t - self.x[i]) / h;
        let u2 = u * u;
        let d00 = (6.0 * u2 - 6.0 * u) / h;
        let d10 = 3.0 * u2 - 4.0 * u + 1.0;
        let d01 = (-6.0 * u2 + 6.0 * u) / h;
        let d11 = 3.0 * u2 - 2.0 * u;
        d00 * self.y[i] + d10 * self.slopes[i] + d01 * self.y[i + 1] + d11 * self.slopes[i + 1]
    }
}

fn secants(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| (yw[1] - yw[0]) / (xw[1] - xw[0]))
        .collect()
}

fn monotone_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta = secants(x, y);
    let mut d = alloc::vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for i in 1..n - 1 {
        let (a, b) = (delta[i - 1], delta[i]);
        if a * b > 0.0 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let w1 = 2.0 * h1 + h0;
            let w2 = h1 + 2.0 * h0;
            d[i] = (w1 + w2) / (w1 / a + w2 / b);
        }
    }
    d[0] = monotone_end_slope(x[1] - x[0], x[2] - x[1], delta[0], delta[1]);
    d[n - 1] = monotone_end_slope(
        x[n - 1] - x[n - 2],
        x[n - 2] - x[n - 3],
        delta[n - 2],
        delta[n - 3],
    );
    d
}

fn monotone_end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d * del0 <= 0.0 {
        0.0
    } else if del0 * del1 <= 0.0 && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

fn centered_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta = secants(x, y);
    let mut d = alloc::vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        d[i] = (h1 * delta[i - 1] + h0 * delta[i]) / (h0 + h1);
    }
    // one-sided three-point formulas at the ends
    let (h0, h1) = (x[1] - x[0], x[2] - x[1]);
    d[0] = ((2.0 * h0 + h1) * delta[0] - h0 * delta[1]) / (h0 + h1);
    let (h0, h1) = (x[n - 1] - x[n - 2], x[n - 2] - x[n - 3]);
    d[n - 1] = ((2.0 * h0 + h1) * delta[n - 2] - h0 * delta[n - 3]) / (h0 + h1);
    d
}

fn lagrange_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|j| {
            let lo = j.saturating_sub(2).min(n - 5);
            let idx = lo..lo + 5;
            let xj = x[j];
            let mut d = 0.0;
            for i in idx.clone() {
                if i == j {
                    let diag: f64 = idx.clone().filter(|&m| m != j).map(|m| 1.0 / (xj - x[m])).sum();
                    d += y[j] * diag;
                } else {
                    let mut w = 1.0 / (x[i] - xj);
                    for m in idx.clone().filter(|&m| m != i && m != j) {
                        w *= (xj - x[m]) / (x[i] - x[m]);
                    }
                    d += y[i] * w;
                }
            }
            d
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    #[allow(unused_imports)]
    use num_traits::Float;

    #[test]
    fn reproduces_nodes() {
        let x = alloc::vec![0.0, 0.5, 1.5, 2.0, 4.0];
        let y = alloc::vec![1.0, 2.0, 2.5, 2.6, 4.0];
        for rule in [SlopeRule::Monotone, SlopeRule::Centered, SlopeRule::Smooth] {
            let c = CubicHermite::new(x.clone(), y.clone(), rule).unwrap();
            for (xi, yi) in x.iter().zip(&y) {
                assert!((c.eval(*xi) - yi).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn monotone_data_gives_monotone_interpolant() {
        let x = alloc::vec![0.0, 1.0, 1.1, 3.0, 3.2, 6.0];
        let y = alloc::vec![0.0, 0.0, 5.0, 5.1, 9.0, 9.0];
        let c = CubicHermite::monotone(x, y).unwrap();
        let ts = crate::linear_grid(0.0, 6.0, 2001);
        let vs: Vec<f64> = ts.iter().map(|&t| c.eval(t)).collect();
        assert!(vs.windows(2).all(|w| w[1] >= w[0] - 1e-14));
    }

    #[test]
    fn centered_rule_is_accurate_on_smooth_data() {
        let x = crate::linear_grid(0.0, 3.0, 61);
        let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let c = CubicHermite::centered(x, y).unwrap();
        let worst = crate::linear_grid(0.0, 3.0, 997)
            .into_iter()
            .map(|t| (c.eval(t) - t.sin()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-5, "{worst}");
    }

    #[test]
    fn smooth_rule_is_fourth_order() {
        let err = |n: usize| {
            let x = crate::linear_grid(0.1, 3.0, n);
            let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
            let c = CubicHermite::smooth(x, y).unwrap();
            crate::linear_grid(0.1, 3.0, 1999)
                .into_iter()
                .map(|t| (c.eval(t) - t.sin()).abs())
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(41), err(81));
        assert!(coarse < 1e-6, "{coarse}");
        assert!(coarse / fine > 12.0, "{coarse} {fine}");
    }

    #[test]
    fn rejects_bad_nodes() {
        assert!(CubicHermite::monotone(alloc::vec![0.0], alloc::vec![1.0]).is_err());
        assert!(CubicHermite::monotone(alloc::vec![0.0, 0.0], alloc::vec![1.0, 2.0]).is_err());
        assert!(CubicHermite::monotone(alloc::vec![0.0, 1.0], alloc::vec![1.0]).is_err());
        assert!(CubicHermite::monotone(alloc::vec![0.0, 1.0], alloc::vec![1.0, f64::NAN]).is_err());
    }
}
