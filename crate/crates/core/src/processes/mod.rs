//! Path simulation for the eight process families and seeded ensembles.

mod ensemble;
mod paths;
mod simulate;

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::rates::RateFunction;

pub use ensemble::{ensemble, Ensemble};
pub use paths::{CountGrid, SamplePath};
pub use simulate::{
    simulate_fnppk, simulate_fnppk_increment, simulate_fpak, simulate_fppk, simulate_nfpak,
    simulate_nfpak_increment, simulate_npak, simulate_nppk, simulate_on_grid, simulate_pak, simulate_ppk,
    FppkMethod, RenewalScale, SimOptions,
};

/// The eight process families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    PPk,
    NPPk,
    FPPk,
    FNPPk,
    PAk,
    NPAk,
    FPAk,
    NFPAk,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::PPk,
        Family::NPPk,
        Family::FPPk,
        Family::FNPPk,
        Family::PAk,
        Family::NPAk,
        Family::FPAk,
        Family::NFPAk,
    ];

    pub fn is_fractional(self) -> bool {
        matches!(self, Family::FPPk | Family::FNPPk | Family::FPAk | Family::NFPAk)
    }

    pub fn is_nonhomogeneous(self) -> bool {
        matches!(self, Family::NPPk | Family::FNPPk | Family::NPAk | Family::NFPAk)
    }

    /// Truncated-geometric jump sizes rather than uniform ones.
    pub fn is_polya_aeppli(self) -> bool {
        matches!(self, Family::PAk | Family::NPAk | Family::FPAk | Family::NFPAk)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::PPk => "ppk",
            Family::NPPk => "nppk",
            Family::FPPk => "fppk",
            Family::FNPPk => "fnppk",
            Family::PAk => "pak",
            Family::NPAk => "npak",
            Family::FPAk => "fpak",
            Family::NFPAk => "nfpak",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Family::ALL
            .into_iter()
            .find(|f| f.name() == lower)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown family '{s}'")))
    }
}

/// Full parameterization of one process family.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSpec {
    family: Family,
    k: u32,
    rho: Option<f64>,
    alpha: Option<f64>,
    lambda: Option<f64>,
    rate: Option<RateFunction>,
}

impl ProcessSpec {
    /// Checks that exactly the parameters the family needs are present.
    pub fn new(
        family: Family,
        k: u32,
        rho: Option<f64>,
        alpha: Option<f64>,
        lambda: Option<f64>,
        rate: Option<RateFunction>,
    ) -> Result<Self> {
        let mut missing = Vec::new();
        let mut extra = Vec::new();
        let mut need = |name: &'static str, present: bool, required: bool| match (present, required) {
            (false, true) => missing.push(name),
            (true, false) => extra.push(name),
            _ => {}
        };
        need("rho", rho.is_some(), family.is_polya_aeppli());
        need("alpha", alpha.is_some(), family.is_fractional());
        need("lambda", lambda.is_some(), !family.is_nonhomogeneous());
        need("rate", rate.is_some(), family.is_nonhomogeneous());
        if !missing.is_empty() || !extra.is_empty() {
            let mut msg = format!("{family}:");
            if !missing.is_empty() {
                msg += &format!(" missing {}", missing.join(", "));
            }
            if !extra.is_empty() {
                msg += &format!(" not applicable {}", extra.join(", "));
            }
            return Err(Error::InvalidSpec(msg));
        }
        if k == 0 {
            return Err(Error::InvalidSpec("k must be at least 1".into()));
        }
        if let Some(r) = rho {
            crate::sampling::check_rho(r)?;
        }
        if let Some(a) = alpha {
            if !(a > 0.0 && a <= 1.0) {
                return domain(format!("alpha must lie in (0, 1], got {a}"));
            }
        }
        if let Some(l) = lambda {
            if !(l >= 0.0) || !l.is_finite() {
                return domain(format!("lambda must be finite and nonnegative, got {l}"));
            }
        }
        Ok(Self {
            family,
            k,
            rho,
            alpha,
            lambda,
            rate,
        })
    }

    pub fn ppk(k: u32, lambda: f64) -> Result<Self> {
        Self::new(Family::PPk, k, None, None, Some(lambda), None)
    }

    pub fn nppk(k: u32, rate: RateFunction) -> Result<Self> {
        Self::new(Family::NPPk, k, None, None, None, Some(rate))
    }

    pub fn fppk(k: u32, lambda: f64, alpha: f64) -> Result<Self> {
        Self::new(Family::FPPk, k, None, Some(alpha), Some(lambda), None)
    }

    pub fn fnppk(k: u32, rate: RateFunction, alpha: f64) -> Result<Self> {
        Self::new(Family::FNPPk, k, None, Some(alpha), None, Some(rate))
    }

    pub fn pak(k: u32, rho: f64, lambda: f64) -> Result<Self> {
        Self::new(Family::PAk, k, Some(rho), None, Some(lambda), None)
    }

    pub fn npak(k: u32, rho: f64, rate: RateFunction) -> Result<Self> {
        Self::new(Family::NPAk, k, Some(rho), None, None, Some(rate))
    }

    pub fn fpak(k: u32, rho: f64, lambda: f64, alpha: f64) -> Result<Self> {
        Self::new(Family::FPAk, k, Some(rho), Some(alpha), Some(lambda), None)
    }

    pub fn nfpak(k: u32, rho: f64, rate: RateFunction, alpha: f64) -> Result<Self> {
        Self::new(Family::NFPAk, k, Some(rho), Some(alpha), None, Some(rate))
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn rho(&self) -> Option<f64> {
        self.rho
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    pub fn rate(&self) -> Option<&RateFunction> {
        self.rate.as_ref()
    }

    /// Intensity as a rate function; homogeneous families give a constant.
    pub fn rate_function(&self) -> RateFunction {
        match (&self.rate, self.lambda) {
            (Some(r), _) => r.clone(),
            (None, Some(l)) => RateFunction::constant(l).expect("validated lambda"),
            (None, None) => unreachable!("validated spec has a rate or a lambda"),
        }
    }

    /// Mean and variance of a single jump size.
    pub fn jump_moments(&self) -> (f64, f64) {
        jump_moments(self.k, self.rho)
    }
}

/// `(E X, Var X)` for uniform (`rho = None`) or truncated geometric jumps.
pub(crate) fn jump_moments(k: u32, rho: Option<f64>) -> (f64, f64) {
    let sev = match rho {
        Some(r) => crate::distributions::severity_trunc_geom(r, k as usize),
        None => crate::distributions::severity_uniform(k as usize),
    };
    let m1: f64 = sev.iter().enumerate().map(|(j, f)| j as f64 * f).sum();
    let m2: f64 = sev.iter().enumerate().map(|(j, f)| (j * j) as f64 * f).sum();
    (m1, m2 - m1 * m1)
}

impl fmt::Display for ProcessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "family={} k={}", self.family, self.k)?;
        if let Some(r) = self.rho {
            write!(f, " rho={r}")?;
        }
        if let Some(a) = self.alpha {
            write!(f, " alpha={a}")?;
        }
        if let Some(l) = self.lambda {
            write!(f, " lambda={l}")?;
        }
        if let Some(r) = &self.rate {
            write!(f, " rate={r}")?;
        }
        Ok(())
    }
}
