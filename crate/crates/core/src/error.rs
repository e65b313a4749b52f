use crate::exponent::ProfileViolations;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{function}: argument {value} is outside the domain ({expected})")]
    Domain {
        function: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("{function}: result is not representable at argument {value}")]
    Overflow { function: &'static str, value: f64 },

    #[error("the radial Fourier transform is implemented for n = 3 only, got n = {0}")]
    Dimension(u32),

    #[error("no convergence after {periods} periods at frequency {frequency} (remaining tail ~ {tail:e})")]
    NonConvergence {
        frequency: f64,
        periods: usize,
        tail: f64,
    },

    #[error("adaptive quadrature failed on [{a}, {b}] (error estimate {error:e} after {intervals} subintervals)")]
    Quadrature {
        a: f64,
        b: f64,
        error: f64,
        intervals: usize,
    },

    #[error("non-finite integrand value at {at}")]
    NonFinite { at: f64 },

    #[error("{0}")]
    Profile(ProfileViolations),

    #[error("wavenumber {k} is outside the table coverage [{k_min}, {k_max}]")]
    TableRange { k: f64, k_min: f64, k_max: f64 },

    #[error("spectral table was built for a different order profile")]
    TableMismatch,

    #[error("spectral symbol {value:e} at k = {k} is below the division floor")]
    SymbolFloor { k: f64, value: f64 },

    #[error("invalid grid: {0}")]
    Grid(&'static str),

    #[error("invalid regularization policy: {0}")]
    Policy(&'static str),

    #[error("invalid argument: {0}")]
    Invalid(&'static str),
}

impl Error {
    pub(crate) fn domain(function: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            function,
            value,
            expected,
        }
    }

    /// True for errors caused by a quadrature or summation that did not converge.
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::Quadrature { .. })
    }
}
