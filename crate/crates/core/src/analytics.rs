//! Analytic moments, inverse-subordinator covariance, LRD diagnostics and
//! empirical estimators.

use rayon::prelude::*;

use crate::distributions::mixture_quadrature;
use crate::error::{domain, Error, Result};
use crate::processes::{jump_moments, Ensemble, Family, ProcessSpec};
use crate::quad::{integrate, QuadConfig};
use crate::rates::RateFunction;
use crate::sampling::{default_path_step, inverse_path_unchecked, RngStream};
use crate::specfun::{ln_gamma_pos, GridFunction};

/// How a moment report was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMethod {
    ClosedForm,
    /// Mean and variance by quadrature against the subordinator density.
    Quadrature,
    /// Mean and variance by quadrature; covariance by Monte Carlo on joint
    /// subordinator paths.
    MonteCarloCovariance,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardErrors {
    pub mean: f64,
    pub variance: f64,
    pub covariance: Option<f64>,
}

/// Mean and variance at `t`, optionally covariance and correlation with `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub mean: f64,
    pub variance: f64,
    pub covariance: Option<f64>,
    pub correlation: Option<f64>,
    pub standard_errors: Option<StandardErrors>,
    pub method: MomentMethod,
}

/// Monte Carlo settings for covariances without a closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMc {
    pub n_paths: usize,
    pub seed: u64,
    pub step: Option<f64>,
}

impl Default for CovarianceMc {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            seed: 0,
            step: None,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    Ok(())
}

fn check_time(name: &str, t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("{name} must be finite and nonnegative, got {t}"));
    }
    Ok(())
}

/// `E[Y_alpha(t)^nu] = Γ(nu+1)/Γ(alpha nu+1) t^{alpha nu}`.
pub fn inv_sub_moment(alpha: f64, nu: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_time("t", t)?;
    if !(nu > 0.0) || !nu.is_finite() {
        return domain(format!("moment order must be positive, got {nu}"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok((ln_gamma_pos(nu + 1.0) - ln_gamma_pos(alpha * nu + 1.0) + alpha * nu * t.ln()).exp())
}

/// `Var[Y_alpha(t)] = t^{2 alpha} (2/Γ(2 alpha+1) - 1/Γ(alpha+1)^2)`.
pub fn inv_sub_var(alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_time("t", t)?;
    Ok(t.powf(2.0 * alpha) * var_coefficient(alpha))
}

fn var_coefficient(alpha: f64) -> f64 {
    2.0 * (-ln_gamma_pos(2.0 * alpha + 1.0)).exp() - (-2.0 * ln_gamma_pos(alpha + 1.0)).exp()
}

/// `Cov[Y_alpha(t), Y_alpha(s)]`.
///
/// With `m = min(s,t)` and `M = max(s,t)` this is evaluated as
/// `m^{2a}/Γ(2a+1) + (1/(Γ(1+a)Γ(a))) ∫_0^m ((M-τ)^a - M^a) τ^{a-1} dτ`,
/// algebraically the same as the product-moment integral minus
/// `(st)^a/Γ(1+a)^2` but free of cancellation. `τ = w^{1/a}` removes the
/// endpoint singularity.
pub fn inv_sub_cov(alpha: f64, t: f64, s: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_time("t", t)?;
    check_time("s", s)?;
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    if lo == 0.0 || alpha == 1.0 {
        return Ok(0.0);
    }
    let head = (2.0 * alpha * lo.ln() - ln_gamma_pos(2.0 * alpha + 1.0)).exp();
    let hi_a = hi.powf(alpha);
    // (M - τ)^a - M^a = M^a expm1(a ln1p(-τ/M))
    let f = |w: f64| {
        let tau = w.powf(1.0 / alpha);
        hi_a * (alpha * (-tau / hi).ln_1p()).exp_m1() / alpha
    };
    let cfg = QuadConfig::new(1e-14, 1e-12);
    let integral = integrate(f, 0.0, lo.powf(alpha), &cfg)?;
    let pref = (-ln_gamma_pos(1.0 + alpha) - ln_gamma_pos(alpha)).exp();
    Ok(head + pref * integral)
}

/// Moments of a compound process `sum_{i <= P(mult * M)} X_i` where `P` is a
/// unit-rate Poisson process and `M` a random operational mass.
struct CompoundParts {
    mult: f64,
    jump_mean: f64,
    jump_second: f64,
}

impl CompoundParts {
    fn new(mult: f64, k: u32, rho: Option<f64>) -> Self {
        let (m, v) = jump_moments(k, rho);
        Self {
            mult,
            jump_mean: m,
            jump_second: v + m * m,
        }
    }

    fn mean(&self, mass_mean: f64) -> f64 {
        self.mult * mass_mean * self.jump_mean
    }

    fn variance(&self, mass_mean: f64, mass_var: f64) -> f64 {
        self.mult * mass_mean * self.jump_second + (self.mult * self.jump_mean).powi(2) * mass_var
    }

    /// Covariance for `s <= t` given `E M_s` and `Cov(M_t, M_s)`.
    fn covariance(&self, mass_mean_min: f64, mass_cov: f64) -> f64 {
        self.mult * mass_mean_min * self.jump_second + (self.mult * self.jump_mean).powi(2) * mass_cov
    }
}

/// Assembles a report from the operational-mass moments at `t` and `s`.
fn assemble(
    parts: &CompoundParts,
    mass_t: (f64, f64),
    other: Option<((f64, f64), f64)>,
    method: MomentMethod,
    cov_se: Option<f64>,
) -> MomentReport {
    let mean = parts.mean(mass_t.0);
    let variance = parts.variance(mass_t.0, mass_t.1).max(0.0);
    let (covariance, correlation) = match other {
        Some((mass_s, mass_cov)) => {
            let min_mean = mass_t.0.min(mass_s.0);
            let cov = parts.covariance(min_mean, mass_cov);
            let var_s = parts.variance(mass_s.0, mass_s.1).max(0.0);
            let corr = if variance > 0.0 && var_s > 0.0 {
                Some(cov / (variance * var_s).sqrt())
            } else {
                None
            };
            (Some(cov), corr)
        }
        None => (None, None),
    };
    MomentReport {
        mean,
        variance,
        covariance,
        correlation,
        standard_errors: cov_se.map(|c| StandardErrors {
            mean: 0.0,
            variance: 0.0,
            covariance: Some(c),
        }),
        method,
    }
}

/// `(mean, variance)` of a clock value.
type MeanVar = (f64, f64);

/// Moments of `lam * Y_alpha` at `t` (and jointly with `s`, with the covariance).
fn linear_clock(lam: f64, alpha: f64, t: f64, s: Option<f64>) -> Result<(MeanVar, Option<(MeanVar, f64)>)> {
    let one = |u: f64| -> Result<MeanVar> {
        if alpha == 1.0 {
            Ok((lam * u, 0.0))
        } else {
            Ok((
                lam * inv_sub_moment(alpha, 1.0, u)?,
                lam * lam * inv_sub_var(alpha, u)?,
            ))
        }
    };
    let at_t = one(t)?;
    let other = match s {
        Some(s) => {
            check_time("s", s)?;
            let cov = if alpha == 1.0 {
                0.0
            } else {
                lam * lam * inv_sub_cov(alpha, t, s)?
            };
            Some((one(s)?, cov))
        }
        None => None,
    };
    Ok((at_t, other))
}

/// Poisson process of order `k`.
pub fn moments_ppk(k: u32, lam: f64, t: f64, s: Option<f64>) -> Result<MomentReport> {
    moments_fppk(k, lam, 1.0, t, s)
}

/// Fractional Poisson process of order `k`.
pub fn moments_fppk(k: u32, lam: f64, alpha: f64, t: f64, s: Option<f64>) -> Result<MomentReport> {
    let spec = ProcessSpec::fppk(k, lam, alpha)?;
    check_time("t", t)?;
    let parts = CompoundParts::new(spec.k() as f64, k, None);
    let (mt, other) = linear_clock(lam, alpha, t, s)?;
    Ok(assemble(&parts, mt, other, MomentMethod::ClosedForm, None))
}

/// Pólya-Aeppli process of order `k`.
pub fn moments_pak(k: u32, rho: f64, lam: f64, t: f64, s: Option<f64>) -> Result<MomentReport> {
    moments_fpak(k, rho, lam, 1.0, t, s)
}

/// Fractional Pólya-Aeppli process of order `k`, with
/// `E N(t) = E[N_PAk(1)] t^alpha / Γ(alpha+1)`.
pub fn moments_fpak(k: u32, rho: f64, lam: f64, alpha: f64, t: f64, s: Option<f64>) -> Result<MomentReport> {
    ProcessSpec::fpak(k, rho, lam, alpha)?;
    check_time("t", t)?;
    let parts = CompoundParts::new(1.0, k, Some(rho));
    let (mt, other) = linear_clock(lam, alpha, t, s)?;
    Ok(assemble(&parts, mt, other, MomentMethod::ClosedForm, None))
}

/// `(E Λ(Y_t), Var Λ(Y_t))` by quadrature against the subordinator density.
fn rate_clock_moments(rate: &RateFunction, alpha: f64, t: f64) -> Result<(f64, f64)> {
    if t == 0.0 {
        return Ok((0.0, 0.0));
    }
    if alpha == 1.0 {
        return Ok((rate.cumulative_unchecked(t), 0.0));
    }
    if let Some(l) = rate.constant_value() {
        return Ok((l * inv_sub_moment(alpha, 1.0, t)?, l * l * inv_sub_var(alpha, t)?));
    }
    let v = mixture_quadrature(alpha, t, 2, 1e-11, |u, out: &mut [f64]| {
        let h = crate::specfun::inv_density_unchecked(alpha, t, u);
        let big_l = rate.cumulative_unchecked(u);
        out[0] = big_l * h;
        out[1] = big_l * big_l * h;
    })?;
    Ok((v[0], (v[1] - v[0] * v[0]).max(0.0)))
}

/// Monte Carlo `Cov[Λ(Y_t), Λ(Y_s)]` from joint lattice paths, with its
/// standard error.
fn rate_clock_cov_mc(
    rate: &RateFunction,
    alpha: f64,
    t: f64,
    s: f64,
    mc: &CovarianceMc,
) -> Result<(f64, f64)> {
    if mc.n_paths < 2 {
        return domain("Monte Carlo covariance needs at least 2 paths");
    }
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    let step = mc.step.unwrap_or_else(|| default_path_step(alpha, hi));
    let grid = [lo, hi];
    let pairs: Vec<(f64, f64)> = (0..mc.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(mc.seed, i as u64);
            let y = inverse_path_unchecked(&mut rng, alpha, &grid, step);
            (rate.cumulative_unchecked(y[0]), rate.cumulative_unchecked(y[1]))
        })
        .collect();
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let est = sample_stats(&xs, &ys);
    Ok((est.cov, est.cov_se))
}

/// Moments of the fractional non-homogeneous Poisson process of order `k`.
pub fn moments_fnppk(
    k: u32,
    rate: &RateFunction,
    alpha: f64,
    t: f64,
    s: Option<f64>,
    mc: &CovarianceMc,
) -> Result<MomentReport> {
    ProcessSpec::fnppk(k, rate.clone(), alpha)?;
    let parts = CompoundParts::new(k as f64, k, None);
    rate_clock_report(&parts, rate, alpha, t, s, mc)
}

/// Moments of the non-homogeneous fractional Pólya-Aeppli process.
pub fn moments_nfpak(
    k: u32,
    rho: f64,
    rate: &RateFunction,
    alpha: f64,
    t: f64,
    s: Option<f64>,
    mc: &CovarianceMc,
) -> Result<MomentReport> {
    ProcessSpec::nfpak(k, rho, rate.clone(), alpha)?;
    let parts = CompoundParts::new(1.0, k, Some(rho));
    rate_clock_report(&parts, rate, alpha, t, s, mc)
}

fn rate_clock_report(
    parts: &CompoundParts,
    rate: &RateFunction,
    alpha: f64,
    t: f64,
    s: Option<f64>,
    mc: &CovarianceMc,
) -> Result<MomentReport> {
    check_time("t", t)?;
    if let Some(l) = rate.constant_value() {
        let (mt, other) = linear_clock(l, alpha, t, s)?;
        return Ok(assemble(parts, mt, other, MomentMethod::ClosedForm, None));
    }
    if alpha == 1.0 {
        let mt = (rate.cumulative_unchecked(t), 0.0);
        let other = match s {
            Some(s) => {
                check_time("s", s)?;
                Some(((rate.cumulative_unchecked(s), 0.0), 0.0))
            }
            None => None,
        };
        return Ok(assemble(parts, mt, other, MomentMethod::ClosedForm, None));
    }
    let mt = rate_clock_moments(rate, alpha, t)?;
    let Some(s) = s else {
        return Ok(assemble(parts, mt, None, MomentMethod::Quadrature, None));
    };
    check_time("s", s)?;
    let ms = rate_clock_moments(rate, alpha, s)?;
    if s == t {
        return Ok(assemble(
            parts,
            mt,
            Some((ms, mt.1)),
            MomentMethod::Quadrature,
            None,
        ));
    }
    if s.min(t) == 0.0 {
        return Ok(assemble(
            parts,
            mt,
            Some((ms, 0.0)),
            MomentMethod::Quadrature,
            None,
        ));
    }
    let (cov, se) = rate_clock_cov_mc(rate, alpha, t, s, mc)?;
    let cov_se = (parts.mult * parts.jump_mean).powi(2) * se;
    Ok(assemble(
        parts,
        mt,
        Some((ms, cov)),
        MomentMethod::MonteCarloCovariance,
        Some(cov_se),
    ))
}

/// Moments for any family.
pub fn moments(spec: &ProcessSpec, t: f64, s: Option<f64>, mc: &CovarianceMc) -> Result<MomentReport> {
    let k = spec.k();
    let alpha = spec.alpha().unwrap_or(1.0);
    match spec.family() {
        Family::PPk | Family::FPPk => moments_fppk(k, spec.lambda().unwrap_or(0.0), alpha, t, s),
        Family::PAk | Family::FPAk => moments_fpak(
            k,
            spec.rho().unwrap_or(0.0),
            spec.lambda().unwrap_or(0.0),
            alpha,
            t,
            s,
        ),
        Family::NPPk | Family::FNPPk => {
            let parts = CompoundParts::new(k as f64, k, None);
            rate_clock_report(&parts, &spec.rate_function(), alpha, t, s, mc)
        }
        Family::NPAk | Family::NFPAk => {
            let parts = CompoundParts::new(1.0, k, spec.rho());
            rate_clock_report(&parts, &spec.rate_function(), alpha, t, s, mc)
        }
    }
}

/// Limit of `Corr[N(t), N(s)] t^alpha` as `t -> ∞` for the fractional Poisson
/// and Pólya-Aeppli families:
/// `[b s^a/Γ(1+a) + a_1^2 s^{2a}/Γ(1+2a)] / (a_1 sqrt(d) sqrt(Var N(s)))`
/// with `a_1 = E N_1(1)`, `b = Var N_1(1)` for the un-time-changed process and
/// `d = 2/Γ(2a+1) - 1/Γ(1+a)^2`.
pub fn lrd_constant(spec: &ProcessSpec, s: f64) -> Result<f64> {
    let alpha = match (spec.family(), spec.alpha()) {
        (Family::FPPk | Family::FPAk, Some(a)) if a < 1.0 => a,
        _ => {
            return Err(Error::InvalidSpec(
                "LRD constant needs a fractional Poisson or Pólya-Aeppli spec with alpha < 1".into(),
            ))
        }
    };
    if !(s > 0.0) || !s.is_finite() {
        return domain(format!("s must be positive, got {s}"));
    }
    let (a1, b) = unit_time_moments(spec)?;
    if !(a1 > 0.0) {
        return domain("LRD constant needs a positive mean rate");
    }
    let d = var_coefficient(alpha);
    let var_s = moments(spec, s, None, &CovarianceMc::default())?.variance;
    let num = b * (alpha * s.ln() - ln_gamma_pos(1.0 + alpha)).exp()
        + a1 * a1 * (2.0 * alpha * s.ln() - ln_gamma_pos(1.0 + 2.0 * alpha)).exp();
    Ok(num / (a1 * d.sqrt() * var_s.sqrt()))
}

/// `(E N_1(1), Var N_1(1))` of the process before the time change.
fn unit_time_moments(spec: &ProcessSpec) -> Result<(f64, f64)> {
    let k = spec.k();
    let lam = spec.lambda().unwrap_or(0.0);
    let r = match spec.family() {
        Family::FPPk | Family::PPk => moments_ppk(k, lam, 1.0, None)?,
        _ => moments_pak(k, spec.rho().unwrap_or(0.0), lam, 1.0, None)?,
    };
    Ok((r.mean, r.variance))
}

/// Exact `Corr[N(t), N(s)]` at each `t` of `ts` for the fractional
/// Poisson or Pólya-Aeppli families.
pub fn correlation_curve(spec: &ProcessSpec, s: f64, ts: &[f64]) -> Result<GridFunction> {
    if !matches!(
        spec.family(),
        Family::FPPk | Family::FPAk | Family::PPk | Family::PAk
    ) {
        return Err(Error::InvalidSpec(
            "closed-form correlation needs a homogeneous family".into(),
        ));
    }
    let values = ts
        .iter()
        .map(|&t| {
            moments(spec, t, Some(s), &CovarianceMc::default())?
                .correlation
                .ok_or_else(|| Error::Domain(format!("correlation undefined at t={t}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    GridFunction::new(ts.to_vec(), values)
}

/// Result of a log-log least-squares fit `ln Corr = ln C + e ln t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrdReport {
    pub fitted_exponent: f64,
    pub fitted_constant: f64,
    pub theoretical_constant: Option<f64>,
    pub fit_range: (f64, f64),
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    pub n_points: usize,
}

/// Fits `ln Corr` against `ln t` over the grid points inside `fit_range`.
pub fn lrd_fit(curve: &GridFunction, fit_range: (f64, f64)) -> Result<LrdReport> {
    let (a, b) = fit_range;
    if !(a > 0.0 && b > a) {
        return domain(format!("fit range must satisfy 0 < a < b, got ({a}, {b})"));
    }
    let pts: Vec<(f64, f64)> = curve
        .grid()
        .iter()
        .zip(curve.values())
        .filter(|(t, c)| **t >= a && **t <= b && **c > 0.0)
        .map(|(t, c)| (t.ln(), c.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Shape(format!(
            "need at least two positive points in [{a}, {b}], found {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Shape("fit range holds a single distinct time".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(LrdReport {
        fitted_exponent: slope,
        fitted_constant: intercept.exp(),
        theoretical_constant: None,
        fit_range,
        residual: (rss / n).sqrt(),
        n_points: pts.len(),
    })
}

/// Fits the exact correlation curve of `spec` at the times `ts` and reports
/// the theoretical constant alongside.
pub fn lrd_report(spec: &ProcessSpec, s: f64, ts: &[f64], fit_range: (f64, f64)) -> Result<LrdReport> {
    let curve = correlation_curve(spec, s, ts)?;
    let mut r = lrd_fit(&curve, fit_range)?;
    r.theoretical_constant = lrd_constant(spec, s).ok();
    Ok(r)
}

/// `n` log-spaced times covering `[a, b]`.
pub fn log_grid(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if !(a > 0.0 && b > a) || n < 2 {
        return domain(format!(
            "log grid needs 0 < a < b and n >= 2, got ({a}, {b}, {n})"
        ));
    }
    let (la, lb) = (a.ln(), b.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => a,
            _ if i == n - 1 => b,
            _ => (la + (lb - la) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

struct SampleStats {
    mean_x: f64,
    var_x: f64,
    mean_se: f64,
    var_se: f64,
    cov: f64,
    cov_se: f64,
    var_y: f64,
}

fn sample_stats(xs: &[f64], ys: &[f64]) -> SampleStats {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy, mut m4, mut cross) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
        m4 += dx.powi(4);
        cross += dx * dx * dy * dy;
    }
    let var_x = sxx / (n - 1.0);
    let var_y = syy / (n - 1.0);
    let cov = sxy / (n - 1.0);
    let m4 = m4 / n;
    let m2 = sxx / n;
    // Var(s^2) ≈ (mu_4 - (n-3)/(n-1) sigma^4) / n
    let var_se = ((m4 - (n - 3.0) / (n - 1.0) * m2 * m2) / n).max(0.0).sqrt();
    let cov_pop = sxy / n;
    let cov_se = ((cross / n - cov_pop * cov_pop) / n).max(0.0).sqrt();
    SampleStats {
        mean_x: mx,
        var_x,
        mean_se: (var_x / n).sqrt(),
        var_se,
        cov,
        cov_se,
        var_y,
    }
}

/// Sample mean and unbiased variance of column `t_index`, and covariance
/// and correlation with `s_index`, all with standard errors.
pub fn empirical_moments(e: &Ensemble, t_index: usize, s_index: Option<usize>) -> Result<MomentReport> {
    if e.n_paths() < 2 {
        return domain("empirical moments need at least 2 paths");
    }
    for idx in std::iter::once(t_index).chain(s_index) {
        if idx >= e.n_grid() {
            return Err(Error::Shape(format!(
                "grid index {idx} out of range 0..{}",
                e.n_grid()
            )));
        }
    }
    let xs: Vec<f64> = e.column(t_index).into_iter().map(|c| c as f64).collect();
    let ys: Vec<f64> = match s_index {
        Some(j) => e.column(j).into_iter().map(|c| c as f64).collect(),
        None => xs.clone(),
    };
    Ok(empirical_from_samples(&xs, s_index.map(|_| ys.as_slice())))
}

/// As [`empirical_moments`] for raw samples.
pub fn empirical_from_samples(xs: &[f64], ys: Option<&[f64]>) -> MomentReport {
    let st = sample_stats(xs, ys.unwrap_or(xs));
    let (covariance, correlation, cov_se) = match ys {
        Some(_) => {
            let corr = if st.var_x > 0.0 && st.var_y > 0.0 {
                Some(st.cov / (st.var_x * st.var_y).sqrt())
            } else {
                None
            };
            (Some(st.cov), corr, Some(st.cov_se))
        }
        None => (None, None, None),
    };
    MomentReport {
        mean: st.mean_x,
        variance: st.var_x,
        covariance,
        correlation,
        standard_errors: Some(StandardErrors {
            mean: st.mean_se,
            variance: st.var_se,
            covariance: cov_se,
        }),
        method: MomentMethod::Empirical,
    }
}
