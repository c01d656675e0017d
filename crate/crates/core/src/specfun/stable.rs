//! Positive alpha-stable density with Laplace transform `exp(-s^alpha)` and the
//! density of the inverse stable subordinator.
//!
//! The large-argument series is used where its partial sums pass a
//! cancellation test. Otherwise the density comes from a fixed Talbot
//! inversion of `exp(-s^alpha)` for `alpha <= 1/2`, and from Kanter's
//! nonnegative integral representation for `alpha > 1/2`, where the
//! transform grows along the Talbot contour.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{ln_gamma_pos, sin_pi};
use crate::error::{domain, Result};
use crate::quad::{integrate, QuadConfig};

/// Nodes used by the fixed Talbot inversion.
pub const TALBOT_NODES: usize = 32;

/// Density `g_alpha(x)` of the positive stable law with `E exp(-s L) = exp(-s^alpha)`.
pub fn stable_density(alpha: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("stable density needs finite x > 0, got {x}"));
    }
    Ok(density_unchecked(alpha, x))
}

/// Density `h_alpha(t, x)` of the inverse stable subordinator at time `t`.
pub fn inv_subordinator_density(alpha: f64, t: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("time must be finite and positive, got {t}"));
    }
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("inverse subordinator density needs x > 0, got {x}"));
    }
    Ok(inv_density_unchecked(alpha, t, x))
}

pub(crate) fn inv_density_unchecked(alpha: f64, t: f64, x: f64) -> f64 {
    let u = t * x.powf(-1.0 / alpha);
    t / alpha * x.powf(-1.0 - 1.0 / alpha) * density_unchecked(alpha, u)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("stable index must lie in (0, 1), got {alpha}"));
    }
    Ok(())
}

pub(crate) fn density_unchecked(alpha: f64, x: f64) -> f64 {
    match series(alpha, x) {
        Some(v) => v,
        None if alpha <= 0.5 => talbot(alpha, x).max(0.0),
        None => kanter_integral(alpha, x),
    }
}

/// `g(x) = (1/pi) ∫_0^pi A(phi) a/(1-a) x^{-1/(1-a)} exp(-A(phi) x^{-a/(1-a)}) dphi`
/// with Kanter's function `A`. The integrand is nonnegative, so this is
/// reliable where the Laplace transform grows along the Talbot contour
/// (`alpha > 1/2`, small `x`).
fn kanter_integral(alpha: f64, x: f64) -> f64 {
    let e = 1.0 / (1.0 - alpha);
    let c = x.powf(-alpha * e);
    let ln_pref = (alpha * e).ln() - e * x.ln() - PI.ln();
    let integrand = |phi: f64| {
        let ln_a =
            ((1.0 - alpha) * phi).sin().ln() + alpha * e * (alpha * phi).sin().ln() - e * phi.sin().ln();
        let a = ln_a.exp();
        if !a.is_finite() {
            return 0.0;
        }
        (ln_pref + ln_a - c * a).exp()
    };
    let cfg = QuadConfig {
        abs_tol: 1e-300,
        rel_tol: 1e-11,
        max_intervals: 2000,
    };
    integrate(integrand, 0.0, PI, &cfg).unwrap_or(0.0).max(0.0)
}

/// Large-x series `(1/pi) sum (-1)^{n+1} Γ(an+1)/n! sin(pi a n) x^{-an-1}`.
/// `None` when the partial sums are not trustworthy.
fn series(alpha: f64, x: f64) -> Option<f64> {
    let ln_x = x.ln();
    let mut sum = 0.0_f64;
    let mut max_env = 0.0_f64;
    let mut prev = f64::INFINITY;
    for n in 1..2_000 {
        let nf = n as f64;
        let ln_env = ln_gamma_pos(alpha * nf + 1.0) - ln_gamma_pos(nf + 1.0) - (alpha * nf + 1.0) * ln_x;
        if ln_env > 700.0 {
            return None;
        }
        let env = ln_env.exp() / PI;
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * env * sin_pi(alpha * nf);
        max_env = max_env.max(env);
        if env <= prev && env <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        if n == 1_999 {
            return None;
        }
        prev = env;
    }
    if !(sum > 0.0) || max_env > 1e3 * sum {
        return None;
    }
    Some(sum)
}

/// Fixed Talbot inversion of `exp(-s^alpha)` at `x`.
fn talbot(alpha: f64, x: f64) -> f64 {
    let m = TALBOT_NODES as f64;
    let r = 2.0 * m / (5.0 * x);
    let mut acc = 0.5 * (r * x - r.powf(alpha)).exp();
    for k in 1..TALBOT_NODES {
        let theta = k as f64 * PI / m;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let v = (s * x - s.powf(alpha)).exp() * Complex64::new(1.0, sigma);
        acc += v.re;
    }
    r / m * acc
}
