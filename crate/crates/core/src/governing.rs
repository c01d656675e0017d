//! Fractional difference-differential systems: an L1 time-stepper for the
//! homogeneous families and residual checks for the non-homogeneous ones.

use rayon::prelude::*;

use crate::distributions::{
    compound_poisson_pmf, inverse_subordinator_upper, mixture_quadrature, severity_trunc_geom,
    severity_uniform, PmfVector,
};
use crate::error::{domain, Error, Result};
use crate::processes::Family;
use crate::rates::RateFunction;
use crate::sampling::check_rho;
use crate::specfun::{
    caputo_l1, inv_density_unchecked, l1_weights, ln_gamma_pos, uniform_step, GridFunction,
};

/// Parameters of the homogeneous system `D^a p = A p` with lower-triangular
/// `(A p)_m = -c p_m + lam sum_{j=1}^{min(m,k)} w_j p_{m-j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    family: Family,
    k: usize,
    rho: Option<f64>,
    lam: f64,
    alpha: f64,
    m_max: usize,
}

impl GeneratorSpec {
    pub fn fppk(k: usize, lam: f64, alpha: f64, m_max: usize) -> Result<Self> {
        Self::new(Family::FPPk, k, None, lam, alpha, m_max)
    }

    pub fn fpak(k: usize, rho: f64, lam: f64, alpha: f64, m_max: usize) -> Result<Self> {
        Self::new(Family::FPAk, k, Some(rho), lam, alpha, m_max)
    }

    fn new(family: Family, k: usize, rho: Option<f64>, lam: f64, alpha: f64, m_max: usize) -> Result<Self> {
        if k == 0 {
            return domain("order k must be at least 1");
        }
        if let Some(r) = rho {
            check_rho(r)?;
        }
        if !(lam >= 0.0) || !lam.is_finite() {
            return domain(format!("rate must be finite and nonnegative, got {lam}"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return domain(format!("alpha must lie in (0, 1], got {alpha}"));
        }
        Ok(Self {
            family,
            k,
            rho,
            lam,
            alpha,
            m_max,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rho(&self) -> Option<f64> {
        self.rho
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    /// Diagonal rate `c` and feed-in weights `w_1..w_k` (index 0 unused).
    fn coefficients(&self) -> (f64, Vec<f64>) {
        match self.rho {
            None => (self.k as f64 * self.lam, vec![self.lam; self.k + 1]),
            Some(rho) => {
                let sev = severity_trunc_geom(rho, self.k);
                (self.lam, sev.iter().map(|f| self.lam * f).collect())
            }
        }
    }

    /// `(A p)_m` for every `m` of `p`.
    fn apply(&self, p: &[f64]) -> Vec<f64> {
        let (c, w) = self.coefficients();
        (0..p.len())
            .map(|m| -c * p[m] + (1..=self.k.min(m)).map(|j| w[j] * p[m - j]).sum::<f64>())
            .collect()
    }
}

/// Negative entries below this are reported as instability.
const NEGATIVE_TOLERANCE: f64 = 1e-8;

fn check_negative(p: &[f64], t: f64, step: f64) -> Result<()> {
    match p.iter().enumerate().find(|(_, v)| **v < -NEGATIVE_TOLERANCE) {
        Some((m, &value)) => Err(Error::Unstable { m, t, value, step }),
        None => Ok(()),
    }
}

/// Implicit L1 time stepping of the system from `p(0) = delta_0` on a
/// uniform grid starting at 0. Entries `0..=m_max` are exact for the
/// truncated system because `A` is lower triangular.
///
/// Solutions start like `1 - c t^alpha + ...`, which plain L1 resolves only
/// to `O(dt^alpha)`. Starting corrections exact on `t^{j alpha}`, `j alpha < 2`
/// (at most six terms), restore the interior order; the first steps they
/// couple are solved together.
pub fn solve_fractional_master(g: &GeneratorSpec, grid: &[f64]) -> Result<Vec<PmfVector>> {
    if grid.len() < 2 || grid[0] != 0.0 {
        return domain("the solver needs a uniform grid of at least 2 points starting at 0");
    }
    let dt = uniform_step(grid)?;
    if !(dt > 0.0) {
        return domain("grid must be strictly increasing");
    }
    let n = grid.len() - 1;
    let dim = g.m_max + 1;
    let (c, w) = g.coefficients();
    let alpha = g.alpha;
    // D^a p(t_i) ≈ mu sum_{j<i} b_j (p_{i-j} - p_{i-j-1})
    let mu = (-alpha * dt.ln() - ln_gamma_pos(2.0 - alpha)).exp();
    let b = l1_weights(alpha, n);
    let starts = start_weights(alpha, &b);

    let mut states: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut p0 = vec![0.0; dim];
    p0[0] = 1.0;
    states.push(p0);
    // The first J steps are coupled through the starting weights and are
    // solved together, one small system per m.
    let j_start = starts[0].len();
    if j_start > 0 {
        let mut block = vec![vec![0.0; dim]; j_start];
        for m in 0..dim {
            let mut a = vec![vec![0.0; j_start]; j_start];
            let mut rhs = vec![0.0; j_start];
            let p0 = states[0][m];
            for i in 1..=j_start {
                let row = i - 1;
                // mu sum_{q<i} b_q (p_{i-q} - p_{i-q-1})
                for q in 0..i {
                    let (hi, lo) = (i - q, i - q - 1);
                    a[row][hi - 1] += mu * b[q];
                    if lo == 0 {
                        rhs[row] += mu * b[q] * p0;
                    } else {
                        a[row][lo - 1] -= mu * b[q];
                    }
                }
                for (l, wl) in starts[i - 1].iter().enumerate() {
                    a[row][l] += mu * wl;
                    rhs[row] += mu * wl * p0;
                }
                a[row][i - 1] += c;
                rhs[row] += (1..=g.k.min(m)).map(|q| w[q] * block[i - 1][m - q]).sum::<f64>();
            }
            solve_dense(&mut a, &mut rhs);
            for (i, v) in rhs.into_iter().enumerate() {
                block[i][m] = v;
            }
        }
        for (i, row) in block.iter().enumerate() {
            check_negative(row, grid[i + 1], dt)?;
        }
        states.extend(block);
    }
    // diffs[i] = p_{i+1} - p_i
    let mut diffs: Vec<Vec<f64>> = states
        .windows(2)
        .map(|s| s[1].iter().zip(&s[0]).map(|(a, b)| a - b).collect())
        .collect();
    let mut hist = vec![0.0; dim];
    for i in states.len()..=n {
        // history = sum_{j=1}^{i-1} b_j diffs[i-1-j]
        hist.iter_mut().for_each(|h| *h = 0.0);
        if alpha < 1.0 {
            for j in 1..i {
                let d = &diffs[i - 1 - j];
                let bj = b[j];
                for (h, dm) in hist.iter_mut().zip(d) {
                    *h += bj * dm;
                }
            }
        }
        let prev = &states[i - 1];
        let mut next = vec![0.0; dim];
        // Starting corrections sum_l W_l (p_l - p_0) make the scheme exact on
        // the leading powers t^{j alpha} of every solution near 0.
        let ws = &starts[i - 1];
        for m in 0..dim {
            let feed: f64 = (1..=g.k.min(m)).map(|j| w[j] * next[m - j]).sum();
            let p0 = states[0][m];
            let corr: f64 = ws
                .iter()
                .enumerate()
                .map(|(l, wl)| mu * wl * (states[l + 1][m] - p0))
                .sum();
            // mu (p - prev + hist) + corr = -c p + feed
            next[m] = (mu * prev[m] - mu * hist[m] - corr + feed) / (mu + c);
        }
        check_negative(&next, grid[i], dt)?;
        diffs.push(next.iter().zip(prev).map(|(a, b)| a - b).collect());
        states.push(next);
    }
    states
        .into_iter()
        .map(|p| {
            let p: Vec<f64> = p.into_iter().map(|x| x.clamp(0.0, 1.0)).collect();
            let total: f64 = p.iter().sum();
            let p = if total > 1.0 {
                p.into_iter().map(|x| x / total).collect()
            } else {
                p
            };
            let tail = (1.0 - total).max(0.0);
            PmfVector::new(p, tail)
        })
        .collect()
}

/// L1 defect `D^a phi(t_n) - L1_n[phi]` for `phi = t^{e}` on a unit grid,
/// in units of `mu` (so the caller scales by `mu dt^e`), `n = 1..=b.len()`.
fn power_defect(alpha: f64, e: f64, b: &[f64]) -> Vec<f64> {
    let c = (ln_gamma_pos(1.0 + e) - ln_gamma_pos(1.0 + e - alpha) + ln_gamma_pos(2.0 - alpha)).exp();
    let incr: Vec<f64> = (0..b.len())
        .map(|i| ((i + 1) as f64).powf(e) - (i as f64).powf(e))
        .collect();
    (1..=b.len())
        .map(|n| c * (n as f64).powf(e - alpha) - (0..n).map(|j| b[j] * incr[n - 1 - j]).sum::<f64>())
        .collect()
}

/// Most starting corrections used by the solver.
const MAX_START_TERMS: usize = 6;

/// Exponents `j alpha < 2` of the leading terms of every solution. `t`
/// itself stays in the set when it occurs: L1 is exact on it, but the
/// corrections must not disturb it either.
fn start_exponents(alpha: f64) -> Vec<f64> {
    (1..)
        .map(|j| j as f64 * alpha)
        .take_while(|e| *e < 2.0)
        .take(MAX_START_TERMS)
        .collect()
}

/// Starting weights, in units of `mu`, for steps `n = 1..=b.len()`: the
/// `J` weights `W_l` with `L1_n[u] + sum_l W_l (u_l - u_0)` exact on every
/// exponent of [`start_exponents`].
fn start_weights(alpha: f64, b: &[f64]) -> Vec<Vec<f64>> {
    if alpha == 1.0 {
        return vec![Vec::new(); b.len()];
    }
    let exps = start_exponents(alpha);
    let j = exps.len().min(b.len());
    let exps = &exps[..j];
    let defects: Vec<Vec<f64>> = exps.iter().map(|&e| power_defect(alpha, e, b)).collect();
    (0..b.len())
        .map(|i| {
            // rows: exponents; columns: starting points 1..=j
            let mut a: Vec<Vec<f64>> = exps
                .iter()
                .map(|&e| (1..=j).map(|c| (c as f64).powf(e)).collect())
                .collect();
            let mut rhs: Vec<f64> = (0..j).map(|r| defects[r][i]).collect();
            solve_dense(&mut a, &mut rhs);
            rhs
        })
        .collect()
}

/// Gaussian elimination with partial pivoting; the solution replaces `rhs`.
fn solve_dense(a: &mut [Vec<f64>], rhs: &mut [f64]) {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("nonempty");
        a.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    for col in (0..n).rev() {
        let s: f64 = (col + 1..n).map(|c| a[col][c] * rhs[c]).sum();
        rhs[col] = (rhs[col] - s) / a[col][col];
    }
}

/// Per-`m` curves `t -> p_m(t)` from a sequence of pmfs on `grid`.
pub fn pmf_curves(grid: &[f64], pmfs: &[PmfVector]) -> Result<Vec<GridFunction>> {
    if grid.len() != pmfs.len() || pmfs.is_empty() {
        return Err(Error::Shape(format!(
            "{} times but {} pmfs",
            grid.len(),
            pmfs.len()
        )));
    }
    let dim = pmfs.iter().map(|p| p.m_max() + 1).min().unwrap_or(0);
    (0..dim)
        .map(|m| GridFunction::new(grid.to_vec(), pmfs.iter().map(|p| p.get(m)).collect()))
        .collect()
}

/// Largest `|LHS - RHS|` of a governing-equation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    /// Maximum over `m` and the grid times inside `window`.
    pub max_residual: f64,
    pub worst_m: usize,
    pub worst_t: f64,
    /// Maximum over every grid time after 0, for reference.
    pub full_range_residual: f64,
    pub window: (f64, f64),
    /// Upper limit of the subordinator integrals, when quadrature is used.
    pub quadrature_cutoff: Option<f64>,
}

fn max_residual(
    lhs: &[GridFunction],
    rhs: impl Fn(usize, usize) -> f64,
    window: (f64, f64),
    cutoff: Option<f64>,
) -> Result<ResidualReport> {
    let mut rep = ResidualReport {
        max_residual: 0.0,
        worst_m: 0,
        worst_t: f64::NAN,
        full_range_residual: 0.0,
        window,
        quadrature_cutoff: cutoff,
    };
    let mut any = false;
    for (m, d) in lhs.iter().enumerate() {
        // d is defined on grid[1..]
        for (i, (&t, &v)) in d.grid().iter().zip(d.values()).enumerate() {
            let r = (v - rhs(m, i + 1)).abs();
            if !r.is_finite() {
                return Err(Error::At {
                    m,
                    t,
                    source: Box::new(Error::Domain(format!("non-finite residual {r}"))),
                });
            }
            rep.full_range_residual = rep.full_range_residual.max(r);
            if t >= window.0 && t <= window.1 {
                any = true;
                if r > rep.max_residual || rep.worst_t.is_nan() {
                    rep.max_residual = r;
                    rep.worst_m = m;
                    rep.worst_t = t;
                }
            }
        }
    }
    if !any {
        return Err(Error::Shape(format!(
            "no grid time after 0 lies in the window [{}, {}]",
            window.0, window.1
        )));
    }
    Ok(rep)
}

fn check_window(window: (f64, f64)) -> Result<()> {
    if !(window.0 <= window.1) {
        return domain(format!("invalid window [{}, {}]", window.0, window.1));
    }
    Ok(())
}

/// Residual of the homogeneous system for supplied curves `p_0, p_1, ...`
/// (one per `m`, on a common uniform grid starting at 0). Times inside
/// `window` enter the maximum; `t = 0` never does.
pub fn residual_homogeneous(
    g: &GeneratorSpec,
    curves: &[GridFunction],
    window: (f64, f64),
) -> Result<ResidualReport> {
    check_window(window)?;
    let Some(first) = curves.first() else {
        return Err(Error::Shape("no curves supplied".into()));
    };
    if curves.iter().any(|c| c.grid() != first.grid()) {
        return Err(Error::Shape("curves must share one grid".into()));
    }
    let lhs = curves
        .iter()
        .map(|c| caputo_l1(c, g.alpha))
        .collect::<Result<Vec<_>>>()?;
    let n = first.len();
    let rhs: Vec<Vec<f64>> = (0..n)
        .map(|i| g.apply(&curves.iter().map(|c| c.values()[i]).collect::<Vec<_>>()))
        .collect();
    max_residual(&lhs, |m, i| rhs[i][m], window, None)
}

/// A non-homogeneous fractional family for [`residual_nonhomogeneous`].
#[derive(Debug, Clone, PartialEq)]
pub struct NonhomogeneousSpec {
    family: Family,
    k: usize,
    rho: Option<f64>,
    rate: RateFunction,
    alpha: f64,
}

impl NonhomogeneousSpec {
    pub fn fnppk(k: usize, rate: RateFunction, alpha: f64) -> Result<Self> {
        Self::new(Family::FNPPk, k, None, rate, alpha)
    }

    pub fn nfpak(k: usize, rho: f64, rate: RateFunction, alpha: f64) -> Result<Self> {
        Self::new(Family::NFPAk, k, Some(rho), rate, alpha)
    }

    fn new(family: Family, k: usize, rho: Option<f64>, rate: RateFunction, alpha: f64) -> Result<Self> {
        if k == 0 {
            return domain("order k must be at least 1");
        }
        if let Some(r) = rho {
            check_rho(r)?;
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return domain(format!("alpha must lie in (0, 1], got {alpha}"));
        }
        Ok(Self {
            family,
            k,
            rho,
            rate,
            alpha,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    fn severity(&self) -> Vec<f64> {
        match self.rho {
            None => severity_uniform(self.k),
            Some(rho) => severity_trunc_geom(rho, self.k),
        }
    }

    /// Poisson count intensity per unit of cumulative rate.
    fn count_multiplier(&self) -> f64 {
        match self.rho {
            None => self.k as f64,
            Some(_) => 1.0,
        }
    }

    /// Increment pmf over a window of mass `mass` and its derivative with
    /// respect to the mass, written into `p` and `dp`.
    fn increment_and_slope(&self, mass: f64, sev: &[f64], p: &mut [f64], dp: &mut [f64]) {
        let mult = self.count_multiplier();
        let m_max = p.len() - 1;
        let q = compound_poisson_pmf(mult * mass, sev, m_max);
        for m in 0..=m_max {
            let feed: f64 = (1..=self.k.min(m)).map(|j| sev[j] * q[m - j]).sum();
            p[m] = q[m];
            dp[m] = mult * (feed - q[m]);
        }
    }
}

/// Residual of the integro-differential equations satisfied by the
/// increment pmf `p*_m(t, v) = P[N(Λ(Y(t)+v)) - N(Λ(v)) = m]`.
///
/// The left side is the L1 Caputo derivative in `t` of `p*` computed on
/// `grid` by quadrature against the subordinator density; the right side is
/// `∫ λ(u+v) ∂_Λ p^n_m(u, v) h(t, u) du`, an independent quadrature. Both
/// use absolute tolerance `abs_tol`. The grid must be uniform and start at
/// 0; maxima run over `m <= m_max` and grid times in `window`.
pub fn residual_nonhomogeneous(
    spec: &NonhomogeneousSpec,
    v: f64,
    grid: &[f64],
    m_max: usize,
    window: (f64, f64),
    abs_tol: f64,
) -> Result<ResidualReport> {
    check_window(window)?;
    if !(v >= 0.0) || !v.is_finite() {
        return domain(format!("v must be finite and nonnegative, got {v}"));
    }
    if grid.len() < 2 || grid[0] != 0.0 {
        return domain("the residual needs a uniform grid of at least 2 points starting at 0");
    }
    uniform_step(grid)?;
    if !(abs_tol > 0.0) {
        return domain(format!("tolerance must be positive, got {abs_tol}"));
    }
    let dim = m_max + 1;
    let sev = spec.severity();
    let alpha = spec.alpha;
    let rate = &spec.rate;
    let base = rate.cumulative_unchecked(v);

    // (p*_m(t), rhs_m(t)) per grid time
    let rows: Vec<(Vec<f64>, Vec<f64>)> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &t)| -> Result<(Vec<f64>, Vec<f64>)> {
            let mut p = vec![0.0; dim];
            let mut dp = vec![0.0; dim];
            if t == 0.0 || alpha == 1.0 {
                let mass = rate.cumulative_unchecked(v + t) - base;
                spec.increment_and_slope(mass, &sev, &mut p, &mut dp);
                let lam = rate.rate_unchecked(v + t);
                return Ok((p, dp.iter().map(|d| lam * d).collect()));
            }
            let both = mixture_quadrature(alpha, t, 2 * dim, abs_tol, |u, out: &mut [f64]| {
                let h = inv_density_unchecked(alpha, t, u);
                let mass = rate.cumulative_unchecked(v + u) - base;
                spec.increment_and_slope(mass, &sev, &mut p, &mut dp);
                let lam = rate.rate_unchecked(v + u);
                for m in 0..dim {
                    out[m] = p[m] * h;
                    out[dim + m] = lam * dp[m] * h;
                }
            })
            .map_err(|e| Error::At {
                m: 0,
                t: grid[i],
                source: Box::new(e),
            })?;
            Ok((both[..dim].to_vec(), both[dim..].to_vec()))
        })
        .collect::<Result<Vec<_>>>()?;

    let lhs = (0..dim)
        .map(|m| {
            let curve = GridFunction::new(grid.to_vec(), rows.iter().map(|r| r.0[m]).collect())?;
            caputo_l1(&curve, alpha)
        })
        .collect::<Result<Vec<_>>>()?;
    let t_end = grid[grid.len() - 1];
    let cutoff = (alpha < 1.0).then(|| inverse_subordinator_upper(alpha, t_end, 1e-3 * abs_tol));
    max_residual(&lhs, |m, i| rows[i].1[m], window, cutoff)
}
