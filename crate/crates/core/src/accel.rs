//! Sequence acceleration: Wynn's epsilon algorithm for slowly convergent
//! alternating partial sums and Richardson extrapolation to a zero parameter.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelEstimate {
    pub value: f64,
    pub error: f64,
}

/// Wynn epsilon table over a sliding window of the most recent partial sums.
#[derive(Debug, Clone)]
pub struct EpsilonAccelerator {
    window: usize,
    sums: Vec<f64>,
    history: Vec<f64>,
}

impl EpsilonAccelerator {
    pub fn new(window: usize) -> Self {
        Self {
            window: window.max(3),
            sums: Vec::with_capacity(window.max(3) + 1),
            history: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    /// Adds a partial sum and returns the current limit estimate once at
    /// least three estimates are available.
    pub fn push(&mut self, partial_sum: f64) -> Option<AccelEstimate> {
        if self.sums.len() == self.window {
            self.sums.remove(0);
        }
        self.sums.push(partial_sum);
        if self.sums.len() < 3 {
            return None;
        }
        let value = wynn_epsilon(&self.sums);
        self.history.push(value);
        let n = self.history.len();
        if n < 3 {
            return None;
        }
        let (e0, e1, e2) = (self.history[n - 1], self.history[n - 2], self.history[n - 3]);
        let error = (e0 - e1).abs() + (e0 - e2).abs() + 8.0 * f64::EPSILON * e0.abs();
        Some(AccelEstimate { value: e0, error })
    }
}

/// Deepest even-column entry of the epsilon table for `sums`.
pub fn wynn_epsilon(sums: &[f64]) -> f64 {
    let Some(&last) = sums.last() else {
        return f64::NAN;
    };
    let mut prev: Vec<f64> = alloc::vec![0.0; sums.len() + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = last;
    let mut column = 0usize;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            let scale = cur[j + 1].abs().max(cur[j].abs());
            if d.abs() <= 4.0 * f64::EPSILON * scale || d == 0.0 {
                // converged column: further columns are noise
                if column % 2 == 0 {
                    return cur[cur.len() - 1];
                }
                return best;
            }
            next.push(prev[j + 1] + 1.0 / d);
        }
        column += 1;
        prev = cur;
        cur = next;
        if column % 2 == 0 {
            let candidate = cur[cur.len() - 1];
            if !candidate.is_finite() {
                return best;
            }
            best = candidate;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RichardsonResult {
    pub value: f64,
    /// Difference from the extrapolation that omits the largest parameter.
    pub error: f64,
    /// Leading power fitted from the three smallest parameters.
    pub fitted_beta: Option<f64>,
    /// Set when the polynomial extrapolation was unstable and the value of
    /// the smallest parameter was returned instead.
    pub fallback: bool,
}

/// Extrapolates `ys(xs)` to `x = 0` assuming `y(x) = y₀ + c₁x + c₂x² + …`
/// (Neville's scheme, degree `xs.len() − 1`).
pub fn richardson_to_zero(xs: &[f64], ys: &[f64]) -> RichardsonResult {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let n = xs.len();
    let smallest = smallest_index(xs);
    if n == 1 {
        return RichardsonResult {
            value: ys[0],
            error: f64::INFINITY,
            fitted_beta: None,
            fallback: true,
        };
    }
    let full = neville_at_zero(xs, ys);
    let largest = largest_index(xs);
    let (xr, yr): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .enumerate()
        .filter(|(i, _)| *i != largest)
        .map(|(_, (x, y))| (*x, *y))
        .unzip();
    let reduced = neville_at_zero(&xr, &yr);
    let error = (full - reduced).abs();
    let fitted_beta = fit_leading_power(xs, ys);
    let scale = ys[smallest].abs().max(f64::MIN_POSITIVE);
    if !full.is_finite() || error > 0.25 * scale {
        let mut others: Vec<usize> = (0..n).filter(|&i| i != smallest).collect();
        others.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
        let spread = others.first().map_or(f64::INFINITY, |&i| (ys[i] - ys[smallest]).abs());
        return RichardsonResult {
            value: ys[smallest],
            error: 2.0 * spread,
            fitted_beta,
            fallback: true,
        };
    }
    RichardsonResult {
        value: full,
        error,
        fitted_beta,
        fallback: false,
    }
}

fn smallest_index(xs: &[f64]) -> usize {
    (0..xs.len()).min_by(|&a, &b| xs[a].total_cmp(&xs[b])).unwrap_or(0)
}

fn largest_index(xs: &[f64]) -> usize {
    (0..xs.len()).max_by(|&a, &b| xs[a].total_cmp(&xs[b])).unwrap_or(0)
}

fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (xs[i] * p[i + 1] - xs[i + m] * p[i]) / (xs[i] - xs[i + m]);
        }
    }
    p[0]
}

/// `β` in `y ≈ y₀ + c x^β` from the three smallest parameters.
fn fit_leading_power(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 3 {
        return None;
    }
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[b].total_cmp(&xs[a]));
    let k = idx.len();
    let (i1, i2, i3) = (idx[k - 3], idx[k - 2], idx[k - 1]);
    let d1 = ys[i1] - ys[i2];
    let d2 = ys[i2] - ys[i3];
    if d1 == 0.0 || d2 == 0.0 || d1.signum() != d2.signum() {
        return None;
    }
    let ratio = xs[i1] / xs[i2];
    let beta = (d1 / d2).ln() / ratio.ln();
    beta.is_finite().then_some(beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_sums_alternating_harmonic_series() {
        let mut acc = EpsilonAccelerator::new(25);
        let mut s = 0.0;
        let mut last = None;
        for k in 1..=25 {
            s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            last = acc.push(s).or(last);
        }
        let est = last.unwrap();
        assert!((est.value - core::f64::consts::LN_2).abs() < 1e-12, "{est:?}");
        assert!(est.error < 1e-10);
    }

    #[test]
    fn epsilon_handles_slow_algebraic_alternation() {
        // Σ (-1)^k (k+1)^(-0.2) = eta(0.2), reference from mpmath.
        let sums: Vec<f64> = (0..40)
            .scan(0.0, |s, k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                *s += sign * ((k + 1) as f64).powf(-0.2);
                Some(*s)
            })
            .collect();
        let v = wynn_epsilon(&sums);
        assert!((v - 0.543_909_624_270_302_85).abs() < 1e-9, "{v}");
    }

    #[test]
    fn epsilon_of_constant_sequence() {
        assert_eq!(wynn_epsilon(&[2.0, 2.0, 2.0, 2.0]), 2.0);
    }

    #[test]
    fn richardson_is_exact_for_cubic() {
        let xs = [0.2, 0.1, 0.05, 0.025];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + 0.5 * x * x - x * x * x).collect();
        let r = richardson_to_zero(&xs, &ys);
        assert!((r.value - 3.0).abs() < 1e-13);
        assert!(!r.fallback);
        let lin: Vec<f64> = xs.iter().map(|x| 1.0 + x).collect();
        let beta = richardson_to_zero(&xs, &lin).fitted_beta.unwrap();
        assert!((beta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn richardson_falls_back_on_noise() {
        let xs = [0.2, 0.1, 0.05, 0.025];
        let ys = [1.0, -3.0, 5.0, -7.0];
        let r = richardson_to_zero(&xs, &ys);
        assert!(r.fallback);
        assert_eq!(r.value, -7.0);
        assert!(r.error > 0.0);
    }
}
