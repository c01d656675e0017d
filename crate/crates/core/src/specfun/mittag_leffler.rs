//! One-, two- and three-parameter Mittag-Leffler functions on the real line.
//!
//! Evaluation paths, tried in order for negative arguments:
//!
//! 1. the defining power series, accepted only while `|z| <= SERIES_SWITCH`
//!    and the largest term times machine epsilon stays below the absolute
//!    tolerance (the series alternates and cancels badly otherwise);
//! 2. for the two-parameter function, the algebraic asymptotic expansion
//!    `E_{a,b}(-x) ~ sum_{n>=1} (-1)^{n+1} x^{-n} / Γ(b - a n)`, accepted when
//!    its smallest term is below the tolerance;
//! 3. the real integral obtained by collapsing the Laplace inversion contour
//!    onto the negative axis,
//!    `E^g_{a,b}(-x) = -(1/pi) ∫_0^∞ e^{-r} Im[(r e^{i pi})^{a g - b} ((r e^{i pi})^a + x)^{-g}] dr`,
//!    valid for `a < 1` and `a g - b > -1`.
//!
//! When no path can certify the tolerance a range error is returned.

use std::f64::consts::PI;

use super::gamma::{ln_gamma_pos, recip_gamma};
use crate::error::{domain, Error, Result};
use crate::quad::{integrate_vec_split, QuadConfig};

/// Largest `|z|` for which the plain series is attempted on the negative axis.
pub const SERIES_SWITCH: f64 = 8.0;

/// Largest `z^{1/alpha}` accepted on the positive axis (the function grows
/// like `exp(z^{1/alpha})`).
pub const POSITIVE_GROWTH_LIMIT: f64 = 650.0;

/// Truncation control for series evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Absolute truncation tolerance.
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

impl SeriesControl {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || max_terms == 0 {
            return domain(format!(
                "series control needs abs_tol > 0 and max_terms >= 1 (got {abs_tol}, {max_terms})"
            ));
        }
        Ok(Self { abs_tol, max_terms })
    }
}

/// Two-parameter Mittag-Leffler function `E_{alpha,beta}(z)`.
pub fn mittag_leffler(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    mittag_leffler_with(alpha, beta, z, &SeriesControl::default())
}

pub fn mittag_leffler_with(alpha: f64, beta: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    prabhakar_scaled(alpha, beta, 1.0, z, 0.0, ctl)
}

/// Three-parameter (Prabhakar) Mittag-Leffler function `E^gamma_{alpha,beta}(z)`.
pub fn prabhakar_ml(alpha: f64, beta: f64, gamma_: f64, z: f64) -> Result<f64> {
    prabhakar_ml_with(alpha, beta, gamma_, z, &SeriesControl::default())
}

pub fn prabhakar_ml_with(alpha: f64, beta: f64, gamma_: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    prabhakar_scaled(alpha, beta, gamma_, z, 0.0, ctl)
}

fn validate(alpha: f64, beta: f64, gamma_: f64, z: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return domain(format!("beta must be positive, got {beta}"));
    }
    if !(gamma_ > 0.0) || !gamma_.is_finite() {
        return domain(format!("gamma must be positive, got {gamma_}"));
    }
    if !z.is_finite() {
        return domain(format!("argument must be finite, got {z}"));
    }
    Ok(())
}

/// `exp(ln_scale) * E^gamma_{alpha,beta}(z)`, with all accuracy decisions
/// made on the scaled quantity.
pub(crate) fn prabhakar_scaled(
    alpha: f64,
    beta: f64,
    gamma_: f64,
    z: f64,
    ln_scale: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    validate(alpha, beta, gamma_, z)?;
    if z == 0.0 {
        return Ok(ln_scale.exp() * recip_gamma(beta));
    }
    if alpha == 1.0 {
        if beta == 1.0 && gamma_ == 1.0 {
            return Ok((z + ln_scale).exp());
        }
        if z > 0.0 {
            return series(alpha, beta, gamma_, z, ln_scale, ctl)?
                .ok_or_else(|| Error::Range(format!("E(1, {beta}, {gamma_}; {z}) overflows")));
        }
        return kummer(beta, gamma_, -z, ln_scale, ctl);
    }
    if z > 0.0 {
        if z.powf(1.0 / alpha) > POSITIVE_GROWTH_LIMIT {
            return Err(Error::Range(format!(
                "positive argument {z} too large for alpha={alpha}"
            )));
        }
        return series(alpha, beta, gamma_, z, ln_scale, ctl)?
            .ok_or_else(|| Error::Range(format!("series overflow at z={z}")));
    }

    let x = -z;
    if x <= SERIES_SWITCH {
        if let Some(v) = series(alpha, beta, gamma_, z, ln_scale, ctl)? {
            return Ok(v);
        }
    }
    if gamma_ == 1.0 {
        if let Some(v) = asymptotic(alpha, beta, x, ln_scale, ctl) {
            return Ok(v);
        }
        if alpha - beta <= -1.0 {
            // E_{a,b}(z) = (E_{a,b-a}(z) - 1/Γ(b-a)) / z lowers b until the
            // contour integral converges at the origin.
            let lower = prabhakar_scaled(alpha, beta - alpha, 1.0, z, ln_scale, ctl)?;
            return Ok((lower - ln_scale.exp() * recip_gamma(beta - alpha)) / z);
        }
    }
    if let Some(v) = contour_integral(alpha, beta, gamma_, x, ln_scale, ctl)? {
        return Ok(v);
    }
    Err(Error::Range(format!(
        "no evaluation path certifies tolerance {:e} for E^{gamma_}_{{{alpha},{beta}}}({z})",
        ctl.abs_tol
    )))
}

/// Power series. Returns `None` when it overflows or cancels beyond the
/// tolerance.
pub(crate) fn series(
    alpha: f64,
    beta: f64,
    gamma_: f64,
    z: f64,
    ln_scale: f64,
    ctl: &SeriesControl,
) -> Result<Option<f64>> {
    let ln_abs_z = z.abs().ln();
    let alternating = z < 0.0;
    // ln[Γ(g+n) / (Γ(g) n!)]
    let mut ln_poch = 0.0;
    let mut sum = 0.0_f64;
    let mut max_term = 0.0_f64;
    let mut prev = f64::INFINITY;
    let mut last = f64::INFINITY;
    for n in 0..ctl.max_terms {
        if n > 0 {
            ln_poch += ((gamma_ + n as f64 - 1.0) / n as f64).ln();
        }
        let ln_mag = ln_scale + ln_poch + n as f64 * ln_abs_z - ln_gamma_pos(alpha * n as f64 + beta);
        if ln_mag > 700.0 {
            return Ok(None);
        }
        let mag = ln_mag.exp();
        let term = if alternating && n % 2 == 1 { -mag } else { mag };
        sum += term;
        max_term = max_term.max(mag);
        last = mag;
        if n > 0 && mag <= prev && (mag <= 1e-17 * sum.abs() || mag < 1e-300) {
            if alternating && 4.0 * f64::EPSILON * max_term > ctl.abs_tol {
                return Ok(None);
            }
            return Ok(Some(sum));
        }
        prev = mag;
    }
    if last < ctl.abs_tol {
        if alternating && 4.0 * f64::EPSILON * max_term > ctl.abs_tol {
            return Ok(None);
        }
        return Ok(Some(sum));
    }
    Err(Error::SeriesNonConvergence {
        abs_tol: ctl.abs_tol,
        max_terms: ctl.max_terms,
        last_term: last,
    })
}

/// alpha = 1, negative argument: Kummer's transformation
/// `1F1(g; b; -x) = e^{-x} 1F1(b-g; b; x)`.
fn kummer(beta: f64, gamma_: f64, x: f64, ln_scale: f64, ctl: &SeriesControl) -> Result<f64> {
    let a = beta - gamma_;
    let base = ln_scale - x - ln_gamma_pos(beta);
    let ln_x = x.ln();
    let mut ln_mag = 0.0_f64;
    let mut sign = 1.0_f64;
    let mut sum = 0.0_f64;
    let mut abs_sum = 0.0_f64;
    for n in 0..ctl.max_terms {
        if n > 0 {
            let num = a + n as f64 - 1.0;
            if num == 0.0 {
                break;
            }
            if num < 0.0 {
                sign = -sign;
            }
            ln_mag += num.abs().ln() - (beta + n as f64 - 1.0).ln() - (n as f64).ln() + ln_x;
        }
        let mag = (base + ln_mag).exp();
        sum += sign * mag;
        abs_sum += mag;
        if n as f64 > x + 1.0 && (mag <= 1e-17 * sum.abs() || mag < 1e-300) {
            break;
        }
        if n + 1 == ctl.max_terms && mag > ctl.abs_tol {
            return Err(Error::SeriesNonConvergence {
                abs_tol: ctl.abs_tol,
                max_terms: ctl.max_terms,
                last_term: mag,
            });
        }
    }
    if 4.0 * f64::EPSILON * abs_sum > ctl.abs_tol {
        return Err(Error::Range(format!(
            "Kummer series for E^{gamma_}_(1,{beta})(-{x}) cancels beyond tolerance"
        )));
    }
    Ok(sum)
}

/// Optimally truncated asymptotic expansion of `E_{a,b}(-x)`; `None` unless the
/// smallest term envelope is below a tenth of the tolerance.
fn asymptotic(alpha: f64, beta: f64, x: f64, ln_scale: f64, ctl: &SeriesControl) -> Option<f64> {
    let ln_x = x.ln();
    let target = 0.1 * ctl.abs_tol;
    let mut sum = 0.0;
    let mut prev_env = f64::INFINITY;
    for n in 1..200 {
        let arg = beta - alpha * n as f64;
        // |1/Γ(arg)| <= Γ(1 - arg)/pi for arg < 1 (envelope ignoring the sine)
        let ln_env = if arg > 0.0 {
            -ln_gamma_pos(arg)
        } else {
            ln_gamma_pos(1.0 - arg) - PI.ln()
        } - n as f64 * ln_x
            + ln_scale;
        let env = ln_env.exp();
        if env < target {
            return Some(sum);
        }
        if env > prev_env {
            return None;
        }
        prev_env = env;
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * (ln_scale - n as f64 * ln_x).exp() * recip_gamma(arg);
    }
    None
}

/// Contour-collapse integral for `E^g_{a,b}(-x)`, `a < 1`, `a g - b > -1`.
pub(crate) fn contour_integral(
    alpha: f64,
    beta: f64,
    gamma_: f64,
    x: f64,
    ln_scale: f64,
    ctl: &SeriesControl,
) -> Result<Option<f64>> {
    let p = alpha * gamma_ - beta;
    if alpha >= 1.0 || p <= -1.0 {
        return Ok(None);
    }
    // r = w^q removes the r^p singularity: r^p dr = q dw.
    let q = 1.0 / (p + 1.0);
    let (s_a, c_a) = (PI * alpha).sin_cos();
    // Upper cut-off from the envelope e^{-r} r^p (x m)^{-g}.
    let m = if alpha > 0.5 { s_a } else { 1.0 };
    let ln_env_const = ln_scale - gamma_ * (x * m).ln() - PI.ln();
    let mut r_max = 40.0_f64.max(2.0 * x.powf(1.0 / alpha));
    while ln_env_const - r_max + p * r_max.ln() > (0.01 * ctl.abs_tol).ln() {
        r_max *= 1.5;
    }
    let w_max = r_max.powf(1.0 / q);
    let integrand = |w: f64| -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let r = w.powf(q);
        let ra = r.powf(alpha);
        let re = ra * c_a + x;
        let im = ra * s_a;
        let ln_abs = 0.5 * (re * re + im * im).ln();
        let arg = im.atan2(re);
        let mag = (ln_scale - r - gamma_ * ln_abs).exp();
        -q / PI * mag * (PI * p - gamma_ * arg).sin()
    };

    // Rough L1 norm to judge cancellation.
    let samples = 400;
    let mut l1 = 0.0;
    let mut peak_w = 0.0;
    let mut peak = 0.0_f64;
    for i in 0..samples {
        let w = w_max * (i as f64 + 0.5) / samples as f64;
        let v = integrand(w).abs();
        l1 += v * w_max / samples as f64;
        if v > peak {
            peak = v;
            peak_w = w;
        }
    }
    if 64.0 * f64::EPSILON * l1.max(peak) > ctl.abs_tol {
        return Ok(None);
    }
    let cfg = QuadConfig {
        abs_tol: 0.1 * ctl.abs_tol,
        rel_tol: 1e-14,
        max_intervals: 4000,
    };
    // The integrand concentrates where r^a is comparable to x.
    let r_knee = (x.powf(1.0 / alpha)).min(r_max * 0.5);
    let mut breaks = vec![0.0];
    for b in [r_knee.powf(1.0 / q), peak_w] {
        if b > 0.0 && b < w_max {
            breaks.push(b);
        }
    }
    breaks.push(w_max);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let v = integrate_vec_split(|w, out: &mut [f64]| out[0] = integrand(w), &breaks, 1, &cfg)?;
    Ok(Some(v[0]))
}
