//! Seedable samplers for the building blocks of every process family.

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Open01;

use crate::error::{domain, Result};
use crate::specfun::ln_gamma_pos;

/// Reproducible random stream identified by `(seed, stream_id)`.
///
/// Streams sharing a seed but differing in id are independent ChaCha streams
/// of the same key.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

#[inline]
fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

#[inline]
pub(crate) fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    -open01(rng).ln()
}

/// Uniform draw on `{1, ..., k}`.
pub fn sample_uniform_k<R: Rng + ?Sized>(rng: &mut R, k: u32) -> Result<u32> {
    if k == 0 {
        return domain("order k must be at least 1");
    }
    Ok(rng.random_range(1..=k))
}

/// Truncated geometric draw on `{1, ..., k}` with `P[X=m] ∝ rho^{m-1}`.
pub fn sample_trunc_geom<R: Rng + ?Sized>(rng: &mut R, rho: f64, k: u32) -> Result<u32> {
    check_rho(rho)?;
    if k == 0 {
        return domain("order k must be at least 1");
    }
    Ok(trunc_geom_unchecked(rng, rho, k))
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rho) {
        return domain(format!("rho must lie in [0, 1), got {rho}"));
    }
    Ok(())
}

pub(crate) fn trunc_geom_unchecked<R: Rng + ?Sized>(rng: &mut R, rho: f64, k: u32) -> u32 {
    if rho == 0.0 || k == 1 {
        return 1;
    }
    // Inverse cdf: P[X <= m] = (1 - rho^m) / (1 - rho^k).
    let u = open01(rng);
    let tail = 1.0 - u * (1.0 - rho.powi(k as i32));
    let m = (tail.ln() / rho.ln()).ceil();
    (m.max(1.0) as u32).min(k)
}

/// Mittag-Leffler waiting time with survival `E_alpha(-(t/scale)^alpha)`.
pub fn sample_mittag_leffler<R: Rng + ?Sized>(rng: &mut R, alpha: f64, scale: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return domain(format!("scale must be positive, got {scale}"));
    }
    Ok(mittag_leffler_unchecked(rng, alpha, scale))
}

pub(crate) fn mittag_leffler_unchecked<R: Rng + ?Sized>(rng: &mut R, alpha: f64, scale: f64) -> f64 {
    let u = open01(rng);
    if alpha == 1.0 {
        return -scale * u.ln();
    }
    let v = open01(rng);
    let (s, c) = (alpha * PI).sin_cos();
    let bracket = s / (alpha * PI * v).tan() - c;
    -scale * u.ln() * bracket.powf(1.0 / alpha)
}

/// One draw of `L_alpha(1)`, the positive stable law with Laplace transform
/// `exp(-s^alpha)`.
pub fn sample_pos_stable<R: Rng + ?Sized>(rng: &mut R, alpha: f64) -> Result<f64> {
    check_stable_alpha(alpha)?;
    Ok(pos_stable_unchecked(rng, alpha))
}

fn check_stable_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("stable index must lie in (0, 1), got {alpha}"));
    }
    Ok(())
}

pub(crate) fn pos_stable_unchecked<R: Rng + ?Sized>(rng: &mut R, alpha: f64) -> f64 {
    let u = PI * open01(rng);
    let e = exp1(rng);
    // Kanter's representation, evaluated in logs.
    let ln_s = (alpha * u).sin().ln() - (u.sin().ln()) / alpha
        + (1.0 - alpha) / alpha * (((1.0 - alpha) * u).sin().ln() - e.ln());
    ln_s.exp().max(f64::MIN_POSITIVE)
}

/// One draw of the inverse stable subordinator `Y_alpha(t)`.
pub fn sample_inverse_subordinator_at<R: Rng + ?Sized>(rng: &mut R, alpha: f64, t: f64) -> Result<f64> {
    check_stable_alpha(alpha)?;
    check_time(t)?;
    Ok(inverse_at_unchecked(rng, alpha, t))
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("time must be finite and nonnegative, got {t}"));
    }
    Ok(())
}

pub(crate) fn inverse_at_unchecked<R: Rng + ?Sized>(rng: &mut R, alpha: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    (t / pos_stable_unchecked(rng, alpha)).powf(alpha)
}

/// Lattice step used when the caller does not choose one: a thousandth of the
/// mean operational time `t^alpha / Γ(1+alpha)` reached by `t_end`.
pub fn default_path_step(alpha: f64, t_end: f64) -> f64 {
    let mean = (alpha * t_end.ln() - ln_gamma_pos(1.0 + alpha)).exp();
    if mean > 0.0 && mean.is_finite() {
        1e-3 * mean
    } else {
        1e-3
    }
}

/// `Y_alpha` on an increasing grid from one simulated `L_alpha` path on the
/// operational-time lattice `j * step`.
pub fn sample_inverse_subordinator_path<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    grid: &[f64],
    step: f64,
) -> Result<Vec<f64>> {
    check_stable_alpha(alpha)?;
    if grid.is_empty() {
        return domain("grid must not be empty");
    }
    if !(step > 0.0) || !step.is_finite() {
        return domain(format!("lattice step must be positive, got {step}"));
    }
    for &t in grid {
        check_time(t)?;
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return domain("grid must be nondecreasing");
    }
    Ok(inverse_path_unchecked(rng, alpha, grid, step))
}

pub(crate) fn inverse_path_unchecked<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    grid: &[f64],
    step: f64,
) -> Vec<f64> {
    let incr_scale = step.powf(1.0 / alpha);
    let mut level = 0.0_f64;
    let mut j: u64 = 0;
    grid.iter()
        .map(|&t| {
            if t == 0.0 {
                return 0.0;
            }
            // First lattice index whose L value exceeds t.
            while level <= t {
                level += incr_scale * pos_stable_unchecked(rng, alpha);
                j += 1;
            }
            j as f64 * step
        })
        .collect()
}
