use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    Dimension(u32),

    #[error("{name} out of domain: {value} ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("quadrature on [{a}, {b}] stopped with error estimate {estimate:e} above target {target:e}")]
    QuadratureTolerance {
        a: f64,
        b: f64,
        estimate: f64,
        target: f64,
    },

    #[error("root finding for {what} did not converge (target {target})")]
    NoConvergence { what: &'static str, target: f64 },

    #[error("non-finite {what} near {at}")]
    NonFinite { what: &'static str, at: f64 },

    #[error("integrand overflow: exponent {exponent} exceeds the representable range")]
    Overflow { exponent: f64 },

    #[error("{0} is undefined for the zero profile")]
    ZeroProfile(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        expected,
    }
}
