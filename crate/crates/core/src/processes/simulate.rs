use rand::Rng;

use super::paths::{check_grid, CountGrid, SamplePath};
use super::{Family, ProcessSpec};
use crate::error::{domain, Result};
use crate::rates::RateFunction;
use crate::sampling::{
    check_rho, default_path_step, exp1, inverse_at_unchecked, inverse_path_unchecked,
    mittag_leffler_unchecked, trunc_geom_unchecked,
};

/// How fractional Poisson paths of order k are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FppkMethod {
    /// Order-k Poisson path read at inverse-subordinator times.
    #[default]
    TimeChange,
    /// Mittag-Leffler renewal epochs with uniform jump sizes.
    Renewal,
}

/// Scale of the Mittag-Leffler waiting times in the renewal method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RenewalScale {
    /// `(k lambda)^{-1/alpha}`: matches the time-changed process exactly.
    #[default]
    Consistent,
    /// `lambda` itself, a common shortcut. Agrees in law with the
    /// time-changed process only when `k lambda^{1+alpha} = 1`.
    LiteralLambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimOptions {
    pub fppk_method: FppkMethod,
    pub renewal_scale: RenewalScale,
    /// Operational-time lattice step for subordinator paths; `None` picks
    /// [`default_path_step`] for the grid's end.
    pub subordinator_step: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
enum Severity {
    Uniform(u32),
    TruncGeom { rho: f64, k: u32 },
}

impl Severity {
    #[inline]
    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> u32 {
        match self {
            Severity::Uniform(k) => rng.random_range(1..=k),
            Severity::TruncGeom { rho, k } => trunc_geom_unchecked(rng, rho, k),
        }
    }
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return domain("order k must be at least 1");
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return domain(format!("{name} must be finite and positive, got {v}"));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    Ok(())
}

/// Event path whose epochs have cumulative intensity `mult * Λ(t)`, obtained
/// by mapping unit-rate arrivals through `Λ^{-1}`.
fn event_path<R: Rng + ?Sized>(
    rng: &mut R,
    mult: f64,
    rate: &RateFunction,
    severity: Severity,
    horizon: f64,
) -> Result<SamplePath> {
    check_positive("horizon", horizon)?;
    let total = mult * rate.cumulative_unchecked(horizon);
    let mut times = Vec::new();
    let mut jumps = Vec::new();
    let mut arrival = exp1(rng);
    while arrival <= total {
        let t = rate.invert_cum_mass(arrival / mult)?.min(horizon);
        // Rounding can produce ties or a zero time; the law is continuous, so
        // nudging keeps the path valid without changing its distribution.
        let t = match times.last() {
            Some(&prev) if t <= prev => prev + f64::EPSILON * prev.max(1.0),
            _ if t <= 0.0 => f64::MIN_POSITIVE,
            _ => t,
        };
        times.push(t.min(horizon));
        jumps.push(severity.draw(rng));
        arrival += exp1(rng);
    }
    Ok(SamplePath::from_parts(times, jumps, horizon))
}

/// Counts at nondecreasing cumulative-intensity levels for a compound
/// process driven by unit-rate arrivals.
fn counts_at_levels<R: Rng + ?Sized>(rng: &mut R, levels: &[f64], severity: Severity) -> Vec<u64> {
    let mut arrival = exp1(rng);
    let mut count = 0u64;
    levels
        .iter()
        .map(|&level| {
            while arrival <= level {
                count += severity.draw(rng) as u64;
                arrival += exp1(rng);
            }
            count
        })
        .collect()
}

/// Inverse-subordinator clock on the grid: the identity for `alpha = 1`, an
/// exact single draw when only one grid time is positive, and the lattice
/// path sampler otherwise.
fn clock<R: Rng + ?Sized>(rng: &mut R, alpha: f64, grid: &[f64], step: Option<f64>) -> Result<Vec<f64>> {
    if alpha == 1.0 {
        return Ok(grid.to_vec());
    }
    let positive: Vec<f64> = grid.iter().copied().filter(|&t| t > 0.0).collect();
    let t_end = *grid.last().expect("nonempty grid");
    if positive.is_empty() {
        return Ok(vec![0.0; grid.len()]);
    }
    if positive.iter().all(|&t| t == positive[0]) {
        let y = inverse_at_unchecked(rng, alpha, positive[0]);
        return Ok(grid.iter().map(|&t| if t > 0.0 { y } else { 0.0 }).collect());
    }
    let step = step.unwrap_or_else(|| default_path_step(alpha, t_end));
    check_positive("subordinator step", step)?;
    Ok(inverse_path_unchecked(rng, alpha, grid, step))
}

fn to_grid(grid: &[f64], counts: Vec<u64>) -> Result<CountGrid> {
    CountGrid::new(grid.to_vec(), counts)
}

/// Poisson process of order `k`: rate `k lam` epochs, uniform jumps on `{1..k}`.
pub fn simulate_ppk<R: Rng + ?Sized>(rng: &mut R, k: u32, lam: f64, horizon: f64) -> Result<SamplePath> {
    check_k(k)?;
    let rate = RateFunction::constant(lam)?;
    event_path(rng, k as f64, &rate, Severity::Uniform(k), horizon)
}

/// Non-homogeneous Poisson process of order `k` with cumulative intensity `k Λ(t)`.
pub fn simulate_nppk<R: Rng + ?Sized>(
    rng: &mut R,
    k: u32,
    rate: &RateFunction,
    horizon: f64,
) -> Result<SamplePath> {
    check_k(k)?;
    event_path(rng, k as f64, rate, Severity::Uniform(k), horizon)
}

/// Pólya-Aeppli process of order `k`: rate `lam` epochs, truncated geometric jumps.
pub fn simulate_pak<R: Rng + ?Sized>(
    rng: &mut R,
    k: u32,
    rho: f64,
    lam: f64,
    horizon: f64,
) -> Result<SamplePath> {
    check_k(k)?;
    check_rho(rho)?;
    let rate = RateFunction::constant(lam)?;
    event_path(rng, 1.0, &rate, Severity::TruncGeom { rho, k }, horizon)
}

pub fn simulate_npak<R: Rng + ?Sized>(
    rng: &mut R,
    k: u32,
    rho: f64,
    rate: &RateFunction,
    horizon: f64,
) -> Result<SamplePath> {
    check_k(k)?;
    check_rho(rho)?;
    event_path(rng, 1.0, rate, Severity::TruncGeom { rho, k }, horizon)
}

/// Fractional Poisson process of order `k` on a grid.
pub fn simulate_fppk<R: Rng + ?Sized>(
    rng: &mut R,
    k: u32,
    lam: f64,
    alpha: f64,
    grid: &[f64],
    opts: &SimOptions,
) -> Result<CountGrid> {
    check_k(k)?;
    check_alpha(alpha)?;
    check_grid(grid)?;
    if !(lam >= 0.0) || !lam.is_finite() {
        return domain(format!("lambda must be finite and nonnegative, got {lam}"));
    }
    match opts.fppk_method {
        FppkMethod::TimeChange => {
            let y = clock(rng, alpha, grid, opts.subordinator_step)?;
            let levels: Vec<f64> = y.iter().map(|u| k as f64 * lam * u).collect();
            to_grid(grid, counts_at_levels(rng, &levels, Severity::Uniform(k)))
        }
        FppkMethod::Renewal => {
            if lam == 0.0 {
                return to_grid(grid, vec![0; grid.len()]);
            }
            let scale = match opts.renewal_scale {
                RenewalScale::Consistent => (k as f64 * lam).powf(-1.0 / alpha),
                RenewalScale::LiteralLambda => lam,
            };
            let mut epoch = mittag_leffler_unchecked(rng, alpha, scale);
            let mut count = 0u64;
            let counts = grid
                .iter()
                .map(|&t| {
                    while epoch <= t {
                        count += rng.random_range(1..=k) as u64;
                        epoch += mittag_leffler_unchecked(rng, alpha, scale);
                    }
                    count
                })
                .collect();
            to_grid(grid, counts)
        }
    }
}

/// Fractional non-homogeneous Poisson process of order `k`, `N^n(Y_alpha(t))`.
pub fn simulate_fnppk<R: Rng + ?Sized>(
    rng: &mut R,
    k: u32,
    rate: &RateFunction,
    alpha: f64,
    grid: &[f64],
    opts: &SimOptions,
) -> Result<CountGrid> {
    simulate_fnppk_increment(rng, k, rate, alpha, 0.0, grid, opts)
}

/// Increment process `N^n(Y_alpha(t) + v) - N^n(v)`.
pub fn simulate_fnppk_increment<R: Rng + ?Sized>(
    rng: &mut R,
    k: u32,
    rate: &RateFunction,
    alpha: f64,
    v: f64,
    grid: &[f64],
    opts: &SimOptions,
) -> Result<CountGrid> {
    check_k(k)?;
    time_changed(rng, k as f64, rate, alpha, v, grid, Severity::Uniform(k), opts)
}

/// Fractional Pólya-Aeppli process of order `k`, `N_PAk(Y_alpha(t))`.
pub fn simulate_fpak<R: Rng + ?Sized>(
    rng: &mut R,
    k: u32,
    rho: f64,
    lam: f64,
    alpha: f64,
    grid: &[f64],
    opts: &SimOptions,
) -> Result<CountGrid> {
    check_k(k)?;
    check_rho(rho)?;
    let rate = RateFunction::constant(lam)?;
    time_changed(
        rng,
        1.0,
        &rate,
        alpha,
        0.0,
        grid,
        Severity::TruncGeom { rho, k },
        opts,
    )
}

/// Non-homogeneous fractional Pólya-Aeppli process, `N_PAk(Λ(Y_alpha(t)))`.
pub fn simulate_nfpak<R: Rng + ?Sized>(
    rng: &mut R,
    k: u32,
    rho: f64,
    rate: &RateFunction,
    alpha: f64,
    grid: &[f64],
    opts: &SimOptions,
) -> Result<CountGrid> {
    simulate_nfpak_increment(rng, k, rho, rate, alpha, 0.0, grid, opts)
}

#[allow(clippy::too_many_arguments)]
pub fn simulate_nfpak_increment<R: Rng + ?Sized>(
    rng: &mut R,
    k: u32,
    rho: f64,
    rate: &RateFunction,
    alpha: f64,
    v: f64,
    grid: &[f64],
    opts: &SimOptions,
) -> Result<CountGrid> {
    check_k(k)?;
    check_rho(rho)?;
    time_changed(
        rng,
        1.0,
        rate,
        alpha,
        v,
        grid,
        Severity::TruncGeom { rho, k },
        opts,
    )
}

#[allow(clippy::too_many_arguments)]
fn time_changed<R: Rng + ?Sized>(
    rng: &mut R,
    mult: f64,
    rate: &RateFunction,
    alpha: f64,
    v: f64,
    grid: &[f64],
    severity: Severity,
    opts: &SimOptions,
) -> Result<CountGrid> {
    check_alpha(alpha)?;
    check_grid(grid)?;
    if !(v >= 0.0) || !v.is_finite() {
        return domain(format!("offset must be finite and nonnegative, got {v}"));
    }
    let y = clock(rng, alpha, grid, opts.subordinator_step)?;
    let base = rate.cumulative_unchecked(v);
    let levels: Vec<f64> = y
        .iter()
        .map(|&u| mult * (rate.cumulative_unchecked(v + u) - base).max(0.0))
        .collect();
    to_grid(grid, counts_at_levels(rng, &levels, severity))
}

/// One realization of any family read on `grid`. Event-time families are
/// simulated to the last grid time and then read off.
pub fn simulate_on_grid<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &ProcessSpec,
    grid: &[f64],
    opts: &SimOptions,
) -> Result<CountGrid> {
    check_grid(grid)?;
    let k = spec.k();
    let horizon = *grid.last().expect("nonempty grid");
    let lam = || spec.lambda().expect("validated spec");
    let rate = || spec.rate().expect("validated spec");
    let rho = || spec.rho().expect("validated spec");
    let alpha = || spec.alpha().expect("validated spec");
    let from_path = |p: Result<SamplePath>| p.and_then(|p| p.counts_on(grid));
    if horizon == 0.0 && !spec.family().is_fractional() {
        return CountGrid::new(grid.to_vec(), vec![0; grid.len()]);
    }
    match spec.family() {
        Family::PPk => from_path(simulate_ppk(rng, k, lam(), horizon)),
        Family::NPPk => from_path(simulate_nppk(rng, k, rate(), horizon)),
        Family::PAk => from_path(simulate_pak(rng, k, rho(), lam(), horizon)),
        Family::NPAk => from_path(simulate_npak(rng, k, rho(), rate(), horizon)),
        Family::FPPk => simulate_fppk(rng, k, lam(), alpha(), grid, opts),
        Family::FNPPk => simulate_fnppk(rng, k, rate(), alpha(), grid, opts),
        Family::FPAk => simulate_fpak(rng, k, rho(), lam(), alpha(), grid, opts),
        Family::NFPAk => simulate_nfpak(rng, k, rho(), rate(), alpha(), grid, opts),
    }
}
