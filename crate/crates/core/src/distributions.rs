//! Exact marginal pmfs of the order-k compound distributions.

use statrs::distribution::{DiscreteCDF, Poisson};

use crate::error::{domain, Error, Result};
use crate::processes::{Family, ProcessSpec};
use crate::quad::{integrate_vec_split, QuadConfig};
use crate::sampling::check_rho;
use crate::specfun::{inv_density_unchecked, ln_gamma_pos, prabhakar_scaled, SeriesControl};

/// Largest `k λ t^α` handled by the Mittag-Leffler resummation in
/// [`pmf_fppk`]; larger arguments go straight to quadrature.
pub const FPPK_SERIES_LIMIT: f64 = 50.0;

/// Probabilities `P[N = m]` for `m = 0..=m_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfVector {
    probs: Vec<f64>,
    tail_mass_bound: f64,
}

impl PmfVector {
    /// Validates entries in `[0, 1]` and total mass at most `1 + 1e-12`.
    pub fn new(probs: Vec<f64>, tail_mass_bound: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Shape("pmf needs at least one entry".into()));
        }
        if let Some((m, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(**p >= 0.0 && **p <= 1.0))
        {
            return Err(Error::Domain(format!("pmf entry {m} = {p} outside [0, 1]")));
        }
        let total: f64 = probs.iter().sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("pmf mass {total} exceeds 1")));
        }
        if !(tail_mass_bound >= 0.0) {
            return Err(Error::Domain(format!("tail bound {tail_mass_bound} is negative")));
        }
        Ok(Self {
            probs,
            tail_mass_bound,
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn m_max(&self) -> usize {
        self.probs.len() - 1
    }

    /// Upper bound on `P[N > m_max]`.
    pub fn tail_mass_bound(&self) -> f64 {
        self.tail_mass_bound
    }

    pub fn get(&self, m: usize) -> f64 {
        self.probs.get(m).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Mean of the truncated pmf, `sum m p_m`.
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(m, p)| m as f64 * p).sum()
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }
}

/// The index set `{(n_1, ..., n_k) : n_1 + 2 n_2 + ... + k n_k = m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OmegaIndex {
    k: usize,
    m: usize,
}

impl OmegaIndex {
    pub fn new(k: usize, m: usize) -> Result<Self> {
        if k == 0 {
            return domain("order k must be at least 1");
        }
        Ok(Self { k, m })
    }

    /// All tuples, generated depth-first from the largest part down.
    pub fn tuples(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = vec![0; self.k];
        fn go(j: usize, rest: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if j == 0 {
                if rest == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            // part size j, multiplicity n_j
            for n in 0..=rest / j {
                cur[j - 1] = n;
                go(j - 1, rest - n * j, cur, out);
            }
            cur[j - 1] = 0;
        }
        go(self.k, self.m, &mut cur, &mut out);
        out
    }
}

/// `P[N = m]` for the Poisson distribution of order `k` by direct summation
/// over [`OmegaIndex`]. Exponential in `m`; meant for cross-checks.
pub fn pmf_poisson_order_k_enumerated(k: usize, big_lambda: f64, m: usize) -> Result<f64> {
    check_mass(big_lambda)?;
    let omega = OmegaIndex::new(k, m)?;
    if big_lambda == 0.0 {
        return Ok(if m == 0 { 1.0 } else { 0.0 });
    }
    let ln_l = big_lambda.ln();
    let s: f64 = omega
        .tuples()
        .iter()
        .map(|n| {
            let z: usize = n.iter().sum();
            let ln_fact: f64 = n.iter().map(|&ni| ln_gamma_pos(ni as f64 + 1.0)).sum();
            (z as f64 * ln_l - ln_fact - k as f64 * big_lambda).exp()
        })
        .sum();
    Ok(s)
}

/// Pólya-Aeppli pmf of order `k` by its closed form, valid for `m <= k`:
/// `q_m = e^{-Λ} sum_{j=1}^m C(m-1, j-1) Q^j / j! rho^{m-j}`,
/// `Q = Λ (1-rho)/(1-rho^k)`.
pub fn pmf_polya_aeppli_closed_form(k: usize, rho: f64, big_lambda: f64, m: usize) -> Result<f64> {
    check_pa(k, rho, big_lambda)?;
    if m > k {
        return domain(format!("closed form only covers m <= k (m={m}, k={k})"));
    }
    let e = (-big_lambda).exp();
    if m == 0 {
        return Ok(e);
    }
    let q = big_lambda * (1.0 - rho) / (1.0 - rho.powi(k as i32));
    let mut s = 0.0;
    for j in 1..=m {
        let ln_binom = ln_gamma_pos(m as f64) - ln_gamma_pos(j as f64) - ln_gamma_pos((m - j + 1) as f64);
        let ln_q = if q > 0.0 {
            j as f64 * q.ln()
        } else {
            f64::NEG_INFINITY
        };
        s += (ln_binom + ln_q - ln_gamma_pos(j as f64 + 1.0)).exp() * rho.powi((m - j) as i32);
    }
    Ok(e * s)
}

fn check_mass(big_lambda: f64) -> Result<()> {
    if !(big_lambda >= 0.0) || !big_lambda.is_finite() {
        return domain(format!(
            "mass parameter must be finite and nonnegative, got {big_lambda}"
        ));
    }
    Ok(())
}

fn check_pa(k: usize, rho: f64, big_lambda: f64) -> Result<()> {
    if k == 0 {
        return domain("order k must be at least 1");
    }
    check_rho(rho)?;
    check_mass(big_lambda)
}

/// Uniform severity on `{1..k}`, indexed from 1 (entry 0 is zero).
pub fn severity_uniform(k: usize) -> Vec<f64> {
    let mut f = vec![1.0 / k as f64; k + 1];
    f[0] = 0.0;
    f
}

/// Truncated geometric severity on `{1..k}`, indexed from 1.
pub fn severity_trunc_geom(rho: f64, k: usize) -> Vec<f64> {
    let norm = if rho == 0.0 {
        1.0
    } else {
        (1.0 - rho) / (1.0 - rho.powi(k as i32))
    };
    let mut f = vec![0.0; k + 1];
    let mut r = 1.0;
    for fj in f.iter_mut().skip(1) {
        *fj = norm * r;
        r *= rho;
    }
    f
}

/// Compound Poisson pmf with Poisson(`count_mean`) jumps of law `severity`
/// (indexed from 1), by the Panjer recursion
/// `p_m = (count_mean/m) sum_j j f_j p_{m-j}`, with running rescaling so
/// large means neither underflow nor overflow.
pub fn compound_poisson_pmf(count_mean: f64, severity: &[f64], m_max: usize) -> Vec<f64> {
    let k = severity.len() - 1;
    let mut v = vec![0.0_f64; m_max + 1];
    v[0] = 1.0;
    // p_m = v_m * exp(ln_scale[m])
    let mut ln_scale = vec![-count_mean; m_max + 1];
    let mut cur = -count_mean;
    for m in 1..=m_max {
        let mut s = 0.0;
        for j in 1..=k.min(m) {
            s += j as f64 * severity[j] * v[m - j];
        }
        v[m] = count_mean / m as f64 * s;
        if v[m] > 1e250 {
            let lo = m.saturating_sub(k);
            for x in &mut v[lo..=m] {
                *x *= 1e-250;
            }
            cur += 250.0 * std::f64::consts::LN_10;
            for ls in &mut ln_scale[lo..=m] {
                *ls = cur;
            }
        }
        ln_scale[m] = cur;
    }
    v.iter()
        .zip(&ln_scale)
        .map(|(&x, &s)| if x > 0.0 { (x.ln() + s).exp().min(1.0) } else { 0.0 })
        .collect()
}

/// `P[Z > n]` for `Z ~ Poisson(mean)`.
fn poisson_tail(mean: f64, n: u64) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    Poisson::new(mean).map(|p| p.sf(n)).unwrap_or(1.0)
}

/// Poisson distribution of order `k` with parameter `big_lambda`.
pub fn pmf_poisson_order_k(k: usize, big_lambda: f64, m_max: usize) -> Result<PmfVector> {
    if k == 0 {
        return domain("order k must be at least 1");
    }
    check_mass(big_lambda)?;
    let count = k as f64 * big_lambda;
    let probs = compound_poisson_pmf(count, &severity_uniform(k), m_max);
    PmfVector::new(probs, poisson_tail(count, (m_max / k) as u64))
}

/// Pólya-Aeppli distribution of order `k`.
pub fn pmf_polya_aeppli_order_k(k: usize, rho: f64, big_lambda: f64, m_max: usize) -> Result<PmfVector> {
    check_pa(k, rho, big_lambda)?;
    let probs = compound_poisson_pmf(big_lambda, &severity_trunc_geom(rho, k), m_max);
    PmfVector::new(probs, poisson_tail(big_lambda, (m_max / k) as u64))
}

/// Increment of the non-homogeneous Poisson process of order `k` over an
/// interval carrying cumulative rate `mass`.
pub fn pmf_nppk_increment(k: usize, mass: f64, m_max: usize) -> Result<PmfVector> {
    pmf_poisson_order_k(k, mass, m_max)
}

/// Increment of the non-homogeneous Pólya-Aeppli process of order `k`.
pub fn pmf_polya_aeppli_increment(k: usize, rho: f64, mass: f64, m_max: usize) -> Result<PmfVector> {
    pmf_polya_aeppli_order_k(k, rho, mass, m_max)
}

/// Marginal pmf of the fractional Poisson process of order `k` at time `t`.
///
/// With `x = k lam t^alpha`, the number of jumps `Z` has
/// `P[Z = z] = x^z E^{z+1}_{alpha, alpha z + 1}(-x)` and each jump is uniform on
/// `{1..k}`. When the Mittag-Leffler path cannot certify its tolerance, or
/// `x > FPPK_SERIES_LIMIT`, the pmf is the mixture of the order-k Poisson
/// pmf over the inverse stable subordinator density, integrated numerically.
pub fn pmf_fppk(k: usize, lam: f64, alpha: f64, t: f64, m_max: usize) -> Result<PmfVector> {
    if k == 0 {
        return domain("order k must be at least 1");
    }
    if !(lam > 0.0) || !lam.is_finite() {
        return domain(format!("rate must be positive, got {lam}"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("time must be finite and nonnegative, got {t}"));
    }
    if alpha == 1.0 || t == 0.0 {
        return pmf_poisson_order_k(k, lam * t, m_max);
    }
    let x = k as f64 * lam * t.powf(alpha);
    if x <= FPPK_SERIES_LIMIT {
        match fppk_by_series(k, x, alpha, m_max) {
            Ok(p) => return Ok(p),
            Err(Error::Range(_)) => {}
            Err(e) => return Err(e),
        }
    }
    pmf_fppk_quadrature(k, lam, alpha, t, m_max, 1e-11)
}

fn fppk_by_series(k: usize, x: f64, alpha: f64, m_max: usize) -> Result<PmfVector> {
    let ctl = SeriesControl::default();
    let ln_x = x.ln();
    let z_probs = (0..=m_max)
        .map(|z| {
            let z = z as f64;
            prabhakar_scaled(alpha, alpha * z + 1.0, z + 1.0, -x, z * ln_x, &ctl).map(|p| p.clamp(0.0, 1.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    let probs = renormalize(mix_jump_counts(&z_probs, k, m_max));
    let total: f64 = probs.iter().sum();
    let slack = (m_max + 1) as f64 * ctl.abs_tol;
    PmfVector::new(probs, (1.0 - total).max(0.0) + slack)
}

fn renormalize(mut p: Vec<f64>) -> Vec<f64> {
    let total: f64 = p.iter().sum();
    if total > 1.0 {
        for x in &mut p {
            *x /= total;
        }
    }
    p
}

/// `p_m = sum_z P[Z=z] u^{*z}(m)` with `u` uniform on `{1..k}`.
fn mix_jump_counts(z_probs: &[f64], k: usize, m_max: usize) -> Vec<f64> {
    let mut probs = vec![0.0; m_max + 1];
    probs[0] = z_probs[0];
    // conv[m] = u^{*z}(m), advanced one jump at a time with prefix sums.
    let mut conv = vec![0.0; m_max + 1];
    conv[0] = 1.0;
    let inv_k = 1.0 / k as f64;
    for (z, &pz) in z_probs.iter().enumerate().skip(1) {
        let mut prefix = vec![0.0; m_max + 2];
        for m in 0..=m_max {
            prefix[m + 1] = prefix[m] + conv[m];
        }
        let mut next = vec![0.0; m_max + 1];
        for m in z..=m_max {
            let lo = m.saturating_sub(k);
            next[m] = inv_k * (prefix[m] - prefix[lo]);
        }
        conv = next;
        for m in z..=m_max {
            probs[m] += pz * conv[m];
        }
    }
    probs
}

/// Upper point `U` with `P[Y_alpha(t) > U] < eps`, from the moment bound
/// `P[Y > U] <= E[Y^nu] / U^nu` minimized over integer `nu`.
pub(crate) fn inverse_subordinator_upper(alpha: f64, t: f64, eps: f64) -> f64 {
    let ln_t = t.ln();
    let ln_bound = |u: f64| {
        (1..400)
            .map(|nu| {
                let nu = nu as f64;
                ln_gamma_pos(nu + 1.0) - ln_gamma_pos(alpha * nu + 1.0) + alpha * nu * ln_t - nu * u.ln()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut u = (alpha * ln_t - ln_gamma_pos(1.0 + alpha)).exp().max(1e-300);
    let target = eps.ln();
    while ln_bound(u) > target {
        u *= 1.25;
    }
    u
}

/// Marginal pmf of the fractional Poisson process of order `k` as
/// `∫ p^{PPk}_m(lam u) h_alpha(t, u) du` by adaptive vector quadrature.
pub fn pmf_fppk_quadrature(
    k: usize,
    lam: f64,
    alpha: f64,
    t: f64,
    m_max: usize,
    abs_tol: f64,
) -> Result<PmfVector> {
    if !(alpha > 0.0 && alpha < 1.0) || !(t > 0.0) || k == 0 || !(lam > 0.0) {
        return domain("quadrature marginal needs k >= 1, lam > 0, alpha in (0,1), t > 0");
    }
    let sev = severity_uniform(k);
    let count_rate = k as f64 * lam;
    let integrand = |u: f64, out: &mut [f64]| {
        let h = inv_density_unchecked(alpha, t, u);
        let p = compound_poisson_pmf(count_rate * u, &sev, m_max);
        for (o, pm) in out.iter_mut().zip(p) {
            *o = pm * h;
        }
    };
    let probs = mixture_quadrature(alpha, t, m_max + 1, abs_tol, integrand)?;
    let probs: Vec<f64> = probs.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
    let total: f64 = probs.iter().sum();
    let slack = (m_max + 1) as f64 * abs_tol;
    PmfVector::new(renormalize(probs), (1.0 - total).max(0.0) + slack)
}

/// Marginal pmf of `N(t)` for any family. Homogeneous and non-homogeneous
/// families are exact; the fractional Poisson family uses [`pmf_fppk`]; the
/// other fractional families mix the increment pmf over the subordinator
/// density by quadrature with absolute tolerance 1e-11.
pub fn pmf_at(spec: &ProcessSpec, t: f64, m_max: usize) -> Result<PmfVector> {
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("time must be finite and nonnegative, got {t}"));
    }
    let k = spec.k() as usize;
    let rate = spec.rate_function();
    let family = spec.family();
    let fixed = |mass: f64| match spec.rho() {
        Some(rho) => pmf_polya_aeppli_order_k(k, rho, mass, m_max),
        None => pmf_poisson_order_k(k, mass, m_max),
    };
    let alpha = spec.alpha().unwrap_or(1.0);
    if !family.is_fractional() || alpha == 1.0 || t == 0.0 {
        return fixed(rate.cumulative(t)?);
    }
    if family == Family::FPPk {
        let lam = spec.lambda().unwrap_or(0.0);
        if lam > 0.0 {
            return pmf_fppk(k, lam, alpha, t, m_max);
        }
        return fixed(0.0);
    }
    let (count_mult, sev) = match spec.rho() {
        Some(rho) => (1.0, severity_trunc_geom(rho, k)),
        None => (k as f64, severity_uniform(k)),
    };
    let abs_tol = 1e-11;
    let probs = mixture_quadrature(alpha, t, m_max + 1, abs_tol, |u, out: &mut [f64]| {
        let h = inv_density_unchecked(alpha, t, u);
        let p = compound_poisson_pmf(count_mult * rate.cumulative_unchecked(u), &sev, m_max);
        for (o, pm) in out.iter_mut().zip(p) {
            *o = pm * h;
        }
    })?;
    let probs: Vec<f64> = probs.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
    let total: f64 = probs.iter().sum();
    let slack = (m_max + 1) as f64 * abs_tol;
    PmfVector::new(renormalize(probs), (1.0 - total).max(0.0) + slack)
}

/// `∫_0^U f(u) h_alpha(t, u) du` for a vector integrand that already
/// includes the density factor.
pub(crate) fn mixture_quadrature<F: FnMut(f64, &mut [f64])>(
    alpha: f64,
    t: f64,
    dim: usize,
    abs_tol: f64,
    f: F,
) -> Result<Vec<f64>> {
    let upper = inverse_subordinator_upper(alpha, t, 1e-3 * abs_tol);
    let mean = (alpha * t.ln() - ln_gamma_pos(1.0 + alpha)).exp();
    let mut breaks = vec![0.0];
    for c in [0.25, 1.0, 3.0] {
        if c * mean < upper {
            breaks.push(c * mean);
        }
    }
    breaks.push(upper);
    let cfg = QuadConfig {
        abs_tol,
        rel_tol: 1e-12,
        max_intervals: 4000,
    };
    integrate_vec_split(f, &breaks, dim, &cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_small_cases() {
        assert_eq!(OmegaIndex::new(3, 1).unwrap().tuples(), vec![vec![1, 0, 0]]);
        // partitions of 4 into parts <= 2: 1+1+1+1, 1+1+2, 2+2
        assert_eq!(OmegaIndex::new(2, 4).unwrap().tuples().len(), 3);
        assert_eq!(OmegaIndex::new(4, 0).unwrap().tuples(), vec![vec![0; 4]]);
        assert!(OmegaIndex::new(0, 3).is_err());
    }

    #[test]
    fn poisson_order_k_reference_values() {
        let p = pmf_poisson_order_k(3, 1.0, 10).unwrap();
        assert!((p.get(0) - (-3.0_f64).exp()).abs() < 1e-15);
        assert!((p.get(1) - (-3.0_f64).exp()).abs() < 1e-15);
        let q = pmf_poisson_order_k(1, 2.5, 20).unwrap();
        let mut pois = (-2.5_f64).exp();
        for m in 0..=20 {
            assert!((q.get(m) - pois).abs() < 1e-15);
            pois *= 2.5 / (m + 1) as f64;
        }
    }

    #[test]
    fn recursion_matches_enumeration() {
        for k in 1..=4 {
            for &l in &[0.3, 1.0, 3.0] {
                let p = pmf_poisson_order_k(k, l, 12).unwrap();
                for m in 0..=12 {
                    let e = pmf_poisson_order_k_enumerated(k, l, m).unwrap();
                    assert!((p.get(m) - e).abs() < 1e-12, "k={k} l={l} m={m}");
                }
            }
        }
    }

    #[test]
    fn polya_aeppli_closed_form_agrees() {
        for k in 1..=4 {
            for &rho in &[0.0, 0.3, 0.8] {
                let p = pmf_polya_aeppli_order_k(k, rho, 2.0, k).unwrap();
                for m in 0..=k {
                    let c = pmf_polya_aeppli_closed_form(k, rho, 2.0, m).unwrap();
                    assert!((p.get(m) - c).abs() < 1e-13, "k={k} rho={rho} m={m}");
                }
            }
        }
        assert!(pmf_polya_aeppli_closed_form(2, 0.5, 1.0, 3).is_err());
    }

    #[test]
    fn large_means_do_not_underflow() {
        let p = pmf_poisson_order_k(2, 500.0, 3000).unwrap();
        assert!((p.total_mass() - 1.0).abs() < 1e-10);
        assert!((p.mean() - 1500.0).abs() < 1e-6);
    }

    #[test]
    fn tail_bound_holds() {
        let p = pmf_poisson_order_k(3, 2.0, 8).unwrap();
        assert!(1.0 - p.total_mass() <= p.tail_mass_bound() + 1e-15);
        let q = pmf_polya_aeppli_order_k(3, 0.5, 2.0, 5).unwrap();
        assert!(1.0 - q.total_mass() <= q.tail_mass_bound() + 1e-15);
    }

    #[test]
    fn fppk_zero_mass_term_is_mittag_leffler() {
        let p = pmf_fppk(2, 1.0, 0.7, 1.0, 6).unwrap();
        let e = crate::specfun::mittag_leffler(0.7, 1.0, -2.0).unwrap();
        assert!((p.get(0) - e).abs() < 1e-12);
    }

    #[test]
    fn fppk_large_argument_falls_back() {
        let p = pmf_fppk(2, 30.0, 0.8, 2.0, 1200).unwrap();
        assert!((p.total_mass() - 1.0).abs() < 1e-8, "{}", p.total_mass());
        let q = pmf_fppk(2, 30.0, 0.8, 2.0, 400).unwrap();
        assert!(1.0 - q.total_mass() <= q.tail_mass_bound());
    }

    #[test]
    fn pmf_vector_validation() {
        assert!(PmfVector::new(vec![], 0.0).is_err());
        assert!(PmfVector::new(vec![0.6, 0.6], 0.0).is_err());
        assert!(PmfVector::new(vec![-0.1], 0.0).is_err());
        assert!(PmfVector::new(vec![0.5], -1.0).is_err());
        assert_eq!(PmfVector::new(vec![0.5, 0.5], 0.0).unwrap().m_max(), 1);
    }
}
