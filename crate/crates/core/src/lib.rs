//! Counting processes of order k: Poisson and Pólya-Aeppli families in
//! homogeneous, non-homogeneous, fractional and fractional non-homogeneous
//! forms, with exact marginals, samplers, moments and governing-equation
//! checks.
//!
//! ```
//! use fcount::{moments, CovarianceMc, ProcessSpec};
//!
//! let spec = ProcessSpec::ppk(3, 1.0).unwrap();
//! let r = moments(&spec, 2.0, Some(1.0), &CovarianceMc::default()).unwrap();
//! assert!((r.mean - 12.0).abs() < 1e-12);
//! assert!((r.covariance.unwrap() - 14.0).abs() < 1e-12);
//! ```

// `!(x > 0.0)` guards are deliberate: they reject NaN along with the range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops read closer to the recurrences they implement.
#![allow(clippy::needless_range_loop)]

pub mod analytics;
pub mod distributions;
mod error;
pub mod governing;
pub mod processes;
pub mod quad;
pub mod rates;
pub mod sampling;
pub mod specfun;
pub mod stats;

pub use analytics::{moments, CovarianceMc, LrdReport, MomentMethod, MomentReport};
pub use distributions::PmfVector;
pub use error::{Error, Result};
pub use governing::{GeneratorSpec, NonhomogeneousSpec, ResidualReport};
pub use processes::{ensemble, CountGrid, Ensemble, Family, ProcessSpec, SamplePath, SimOptions};
pub use rates::RateFunction;
pub use sampling::RngStream;
pub use specfun::{GridFunction, SeriesControl};
