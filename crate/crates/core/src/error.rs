use thiserror::Error;

/// Errors raised by the numerical and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument outside the supported evaluation range: {0}")]
    Range(String),

    #[error(
        "series failed to reach tolerance {abs_tol:e} within {max_terms} terms (last term {last_term:e})"
    )]
    SeriesNonConvergence {
        abs_tol: f64,
        max_terms: usize,
        last_term: f64,
    },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("quadrature did not converge on [{a}, {b}]: estimate {estimate:e}, error {error:e} after {intervals} subintervals")]
    Quadrature {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error("cumulative mass {target} is unreachable (the cumulative rate is bounded by {supremum})")]
    UnreachableMass { target: f64, supremum: f64 },

    #[error(
        "cumulative mass {target} is attained on a whole interval [{from}, {to}]; the inverse is ambiguous"
    )]
    AmbiguousInverse { target: f64, from: f64, to: f64 },

    #[error(
        "negative probability {value:e} for m={m} at t={t}; refine the time grid (current step {step:e})"
    )]
    Unstable { m: usize, t: f64, value: f64, step: f64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("numeric failure at m={m}, t={t}: {source}")]
    At {
        m: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
