//! Special functions: gamma, Mittag-Leffler, stable densities and the
//! discrete Caputo derivative.

mod caputo;
mod gamma;
mod mittag_leffler;
mod stable;

pub use caputo::{caputo_l1, GridFunction};
pub use gamma::{gamma, log_gamma, recip_gamma};
pub use mittag_leffler::{
    mittag_leffler, mittag_leffler_with, prabhakar_ml, prabhakar_ml_with, SeriesControl,
    POSITIVE_GROWTH_LIMIT, SERIES_SWITCH,
};
pub use stable::{inv_subordinator_density, stable_density, TALBOT_NODES};

pub(crate) use caputo::{l1_weights, uniform_step};
pub(crate) use gamma::ln_gamma_pos;
pub(crate) use mittag_leffler::prabhakar_scaled;
pub(crate) use stable::inv_density_unchecked;
