//! Numerics for the variable-order fractional Laplacian on radial data.
//!
//! The order `s(r)` of the operator varies with the radius. Its Green's
//! function is minus the variable-order Riesz kernel
//!
//! ```text
//! K(r) = Γ(n/2 − s(r)) / (4^s(r) π^(n/2) Γ(s(r))) · r^(2 s(r) − n)
//! ```
//!
//! and the operator itself is defined in Fourier space by division with the
//! transform `K̂(k)`. The crate is organised bottom-up:
//!
//! - [`specialfun`]: gamma, log-gamma and digamma on the positive axis.
//! - [`exponent`]: order profiles `s(r)` and their admissibility checks.
//! - [`kernel`]: the kernel, `p(r) = r K(r)`, and the Green's function.
//! - [`quadrature`], [`accel`], [`oscillatory`]: adaptive Gauss–Kronrod,
//!   sequence acceleration and the half-period sine-integral engine.
//! - [`sinexform`]: `K̂(k)` with Abel (`e^{−λr}`) regularization.
//! - [`spectral`]: radial transforms, the operator, its inverse and the
//!   Poisson solver.
//! - [`oracles`]: independent reference computations and executable checks.
//!
//! The crate is `no_std` when built without the default `std` feature; it
//! only needs `alloc`.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
// `!(x > 0.0)` is the NaN-rejecting form of these checks; the rule tables
// are kept at their published precision
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

pub mod accel;
pub mod error;
pub mod exponent;
pub mod interp;
pub mod kernel;
pub mod oracles;
pub mod oscillatory;
pub mod quadrature;
pub mod sinexform;
pub mod specialfun;
pub mod spectral;

pub use error::{Error, Result};
pub use exponent::{make_example1, make_example2, ExponentProfile, ProfileForm};
pub use kernel::{green_function, kernel_eval, GreenFunctionSample, KernelEvaluation};
pub use sinexform::{khat, khat_grid, RegularizationPolicy, SineTransformResult};
pub use spectral::{RadialField, SpectralTable};

/// Log-spaced grid of `count` points from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, count: usize) -> alloc::vec::Vec<f64> {
    #[allow(unused_imports)]
    use num_traits::Float;
    match count {
        0 => alloc::vec::Vec::new(),
        1 => alloc::vec![min],
        _ => {
            let (a, b) = (min.ln(), max.ln());
            let step = (b - a) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i + 1 == count {
                        max
                    } else {
                        (a + step * i as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Uniform grid of `count` points from `min` to `max` inclusive.
pub fn linear_grid(min: f64, max: f64, count: usize) -> alloc::vec::Vec<f64> {
    match count {
        0 => alloc::vec::Vec::new(),
        1 => alloc::vec![min],
        _ => {
            let step = (max - min) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { max } else { min + step * i as f64 })
                .collect()
        }
    }
}
