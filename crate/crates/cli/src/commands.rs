use clap::{Args, ValueEnum};
use fcount::analytics::{correlation_curve, log_grid, lrd_report};
use fcount::distributions::{pmf_at, pmf_fppk, pmf_poisson_order_k, pmf_polya_aeppli_order_k};
use fcount::governing::{pmf_curves, residual_homogeneous, residual_nonhomogeneous, solve_fractional_master};
use fcount::processes::{FppkMethod, RenewalScale};
use fcount::{
    ensemble, moments as moments_of, CovarianceMc, Family, GeneratorSpec, NonhomogeneousSpec, ProcessSpec,
    ResidualReport, SimOptions,
};
use rayon::prelude::*;

use crate::output::{Artifact, Cell};
use crate::spec::{check_flags, parse_rate, SpecArgs};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    TimeChange,
    Renewal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Consistent,
    LiteralLambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    Series,
    Solver,
}

/// Monte Carlo settings for the covariances that have no closed form.
#[derive(Debug, Clone, Args)]
pub struct McArgs {
    /// Paths for Monte Carlo covariances (non-homogeneous fractional families only)
    #[arg(long, default_value_t = 100_000)]
    pub n_paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Operational-time lattice step of the subordinator paths
    #[arg(long)]
    pub step: Option<f64>,
}

impl McArgs {
    fn config(&self, art: &mut Artifact) -> CovarianceMc {
        art.param("n_paths", self.n_paths);
        if let Some(h) = self.step {
            art.param("step", h);
        }
        art.seed = Some(self.seed);
        CovarianceMc {
            n_paths: self.n_paths,
            seed: self.seed,
            step: self.step,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    t_end: f64,
    #[arg(long, default_value_t = 0.0)]
    t_start: f64,
    /// Grid points; 1 reports only N(t_end)
    #[arg(long, default_value_t = 1)]
    n_points: usize,
    #[arg(long, default_value_t = 1000)]
    n_paths: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Path construction for fppk
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Waiting-time scale of the renewal method
    #[arg(long, value_enum)]
    renewal_scale: Option<Scale>,
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PmfArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    t: Option<f64>,
    /// Cumulative intensity (lambda t for the homogeneous families); non-fractional families only
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long, default_value_t = 20)]
    m_max: usize,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    t: f64,
    /// Second time for the covariance
    #[arg(long)]
    s: Option<f64>,
    #[command(flatten)]
    mc: McArgs,
}

#[derive(Debug, Args)]
pub struct CovArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    s: f64,
    #[arg(long, default_value_t = 0.0)]
    t_start: f64,
    #[arg(long)]
    t_end: f64,
    #[arg(long, default_value_t = 11)]
    n_points: usize,
    #[command(flatten)]
    mc: McArgs,
}

#[derive(Debug, Args)]
pub struct LrdArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long, default_value_t = 100.0)]
    t_start: f64,
    #[arg(long, default_value_t = 10_000.0)]
    t_end: f64,
    /// Log-spaced grid points
    #[arg(long, default_value_t = 41)]
    n_points: usize,
    /// Fit range, defaults to the whole grid
    #[arg(long)]
    fit_start: Option<f64>,
    #[arg(long)]
    fit_end: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    t_end: f64,
    /// Grid points including t = 0
    #[arg(long, default_value_t = 2001)]
    n_points: usize,
    #[arg(long, default_value_t = 10)]
    m_max: usize,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 2.0)]
    t_end: f64,
    /// Grid points including t = 0
    #[arg(long, default_value_t = 4001)]
    n_points: usize,
    #[arg(long, default_value_t = 5)]
    m_max: usize,
    /// Residual window start; the first L1 steps carry an O(1) start-up defect
    #[arg(long, default_value_t = 0.1)]
    window_start: f64,
    /// Residual window end, defaults to t_end
    #[arg(long)]
    window_end: Option<f64>,
    /// Curves to check for fppk/fpak (fpak has no series)
    #[arg(long, value_enum)]
    source: Option<Source>,
    /// Time shift of the increment pmf (fnppk/nfpak)
    #[arg(long)]
    v: Option<f64>,
    /// Quadrature tolerance (fnppk/nfpak)
    #[arg(long)]
    tol: Option<f64>,
}

fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if n == 0 {
        return Err(CliError::usage("--n-points must be at least 1"));
    }
    if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= a) {
        return Err(CliError::usage(format!(
            "need 0 <= --t-start <= --t-end, got {a} and {b}"
        )));
    }
    if n == 1 {
        return Ok(vec![b]);
    }
    let h = (b - a) / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
    g[n - 1] = b;
    Ok(g)
}

fn grid_params(art: &mut Artifact, a: f64, b: f64, n: usize) {
    art.param("t_start", a);
    art.param("t_end", b);
    art.param("n_points", n);
}

pub fn simulate(a: SimulateArgs) -> Result<Artifact, CliError> {
    let mut art = Artifact::new("simulate");
    let spec = a.spec.build(&mut art)?;
    if spec.family() != Family::FPPk {
        let extra: Vec<&str> = [
            a.method.map(|_| "--method"),
            a.renewal_scale.map(|_| "--renewal-scale"),
        ]
        .into_iter()
        .flatten()
        .collect();
        check_flags(spec.family(), &[], &extra)?;
    }
    if a.renewal_scale.is_some() && a.method != Some(Method::Renewal) {
        return Err(CliError::usage("--renewal-scale needs --method renewal"));
    }
    if a.n_paths == 0 {
        return Err(CliError::usage("--n-paths must be at least 1"));
    }
    let grid = linspace(a.t_start, a.t_end, a.n_points)?;
    grid_params(&mut art, a.t_start, a.t_end, a.n_points);
    art.param("n_paths", a.n_paths);
    let opts = SimOptions {
        fppk_method: match a.method {
            Some(Method::Renewal) => FppkMethod::Renewal,
            _ => FppkMethod::TimeChange,
        },
        renewal_scale: match a.renewal_scale {
            Some(Scale::LiteralLambda) => RenewalScale::LiteralLambda,
            _ => RenewalScale::Consistent,
        },
        subordinator_step: a.step,
    };
    if let Some(m) = a.method {
        art.param("method", m.to_possible_value().expect("named").get_name());
    }
    if let Some(s) = a.renewal_scale {
        art.param("renewal_scale", s.to_possible_value().expect("named").get_name());
    }
    if let Some(h) = a.step {
        art.param("step", h);
    }
    art.seed = Some(a.seed);
    let e = ensemble(a.seed, &spec, a.n_paths, &grid, &opts)?;
    let mut cols = vec!["path".to_string()];
    cols.extend(grid.iter().map(|t| format!("N({t})")));
    art.columns(&cols);
    art.rows = (0..e.n_paths())
        .map(|i| {
            let mut row = vec![Cell::from(i)];
            row.extend(e.row(i).iter().map(|&n| Cell::from(n)));
            row
        })
        .collect();
    Ok(art)
}

pub fn pmf(a: PmfArgs) -> Result<Artifact, CliError> {
    let mut art = Artifact::new("pmf");
    let pmf = match (a.t, a.mass) {
        (Some(_), Some(_)) => return Err(CliError::usage("conflicting parameters: --t, --mass")),
        (None, None) => return Err(CliError::usage("missing parameter: --t or --mass")),
        (Some(t), None) => {
            let spec = a.spec.build(&mut art)?;
            art.param("t", t);
            art.param("m_max", a.m_max);
            pmf_at(&spec, t, a.m_max)?
        }
        (None, Some(mass)) => {
            let family = a.spec.family()?;
            let mut missing = Vec::new();
            if a.spec.k.is_none() {
                missing.push("--k");
            }
            let mut extra = Vec::new();
            if family.is_fractional() {
                extra.push("--mass");
            }
            match (a.spec.rho.is_some(), family.is_polya_aeppli()) {
                (false, true) => missing.push("--rho"),
                (true, false) => extra.push("--rho"),
                _ => {}
            }
            for (flag, present) in [
                ("--lambda", a.spec.lambda.is_some()),
                ("--rate", a.spec.rate.is_some()),
                ("--alpha", a.spec.alpha.is_some()),
            ] {
                if present {
                    extra.push(flag);
                }
            }
            check_flags(family, &missing, &extra)?;
            if mass < 0.0 || !mass.is_finite() {
                return Err(CliError::usage(format!(
                    "--mass must be finite and nonnegative, got {mass}"
                )));
            }
            a.spec.record(&mut art);
            art.param("mass", mass);
            art.param("m_max", a.m_max);
            let k = a.spec.k()? as usize;
            match a.spec.rho {
                Some(rho) => pmf_polya_aeppli_order_k(k, rho, mass, a.m_max)
                    .map_err(|e| CliError::usage(e.to_string()))?,
                None => pmf_poisson_order_k(k, mass, a.m_max)?,
            }
        }
    };
    art.summary("tail_mass_bound", pmf.tail_mass_bound());
    art.summary("total_mass", pmf.total_mass());
    art.columns(&["m", "probability"]);
    art.rows = pmf
        .probs()
        .iter()
        .enumerate()
        .map(|(m, &p)| vec![Cell::from(m), Cell::from(p)])
        .collect();
    Ok(art)
}

fn method_name(m: fcount::MomentMethod) -> &'static str {
    match m {
        fcount::MomentMethod::ClosedForm => "closed-form",
        fcount::MomentMethod::Quadrature => "quadrature",
        fcount::MomentMethod::MonteCarloCovariance => "monte-carlo-covariance",
        fcount::MomentMethod::Empirical => "empirical",
    }
}

pub fn moments(a: MomentsArgs) -> Result<Artifact, CliError> {
    let mut art = Artifact::new("moments");
    let spec = a.spec.build(&mut art)?;
    art.param("t", a.t);
    if let Some(s) = a.s {
        art.param("s", s);
    }
    let mc = a.mc.config(&mut art);
    let r = moments_of(&spec, a.t, a.s, &mc)?;
    art.columns(&[
        "t",
        "s",
        "mean",
        "variance",
        "covariance",
        "correlation",
        "covariance_se",
        "method",
    ]);
    let se = r.standard_errors.and_then(|e| e.covariance);
    art.rows = vec![vec![
        a.t.into(),
        a.s.into(),
        r.mean.into(),
        r.variance.into(),
        r.covariance.into(),
        r.correlation.into(),
        se.into(),
        method_name(r.method).into(),
    ]];
    Ok(art)
}

pub fn cov(a: CovArgs) -> Result<Artifact, CliError> {
    let mut art = Artifact::new("cov");
    let spec = a.spec.build(&mut art)?;
    art.param("s", a.s);
    grid_params(&mut art, a.t_start, a.t_end, a.n_points);
    let grid = linspace(a.t_start, a.t_end, a.n_points)?;
    let mc = a.mc.config(&mut art);
    art.columns(&[
        "t",
        "mean",
        "variance",
        "covariance",
        "correlation",
        "covariance_se",
        "method",
    ]);
    for &t in &grid {
        let r = moments_of(&spec, t, Some(a.s), &mc)?;
        let se = r.standard_errors.and_then(|e| e.covariance);
        art.rows.push(vec![
            t.into(),
            r.mean.into(),
            r.variance.into(),
            r.covariance.into(),
            r.correlation.into(),
            se.into(),
            method_name(r.method).into(),
        ]);
    }
    Ok(art)
}

pub fn lrd(a: LrdArgs) -> Result<Artifact, CliError> {
    let mut art = Artifact::new("lrd");
    let spec = a.spec.build(&mut art)?;
    if spec.family().is_nonhomogeneous() {
        return Err(CliError::usage(format!(
            "lrd needs a homogeneous family, got {}",
            spec.family()
        )));
    }
    art.param("s", a.s);
    grid_params(&mut art, a.t_start, a.t_end, a.n_points);
    let fit = (a.fit_start.unwrap_or(a.t_start), a.fit_end.unwrap_or(a.t_end));
    art.param("fit_start", fit.0);
    art.param("fit_end", fit.1);
    let ts = log_grid(a.t_start, a.t_end, a.n_points).map_err(|e| CliError::usage(e.to_string()))?;
    let curve = correlation_curve(&spec, a.s, &ts)?;
    let rep = lrd_report(&spec, a.s, &ts, fit)?;
    art.summary("fitted_exponent", rep.fitted_exponent);
    art.summary("fitted_constant", rep.fitted_constant);
    art.summary("theoretical_constant", rep.theoretical_constant);
    art.summary("fit_rms_residual", rep.residual);
    art.summary("fit_points", rep.n_points);
    let alpha = spec.alpha().unwrap_or(1.0);
    art.columns(&["t", "correlation", "correlation_times_t_alpha"]);
    art.rows = curve
        .grid()
        .iter()
        .zip(curve.values())
        .map(|(&t, &c)| vec![t.into(), c.into(), (c * t.powf(alpha)).into()])
        .collect();
    Ok(art)
}

fn generator(spec: &ProcessSpec, m_max: usize) -> Result<GeneratorSpec, CliError> {
    let k = spec.k() as usize;
    let (lam, alpha) = (spec.lambda().unwrap_or(0.0), spec.alpha().unwrap_or(1.0));
    match (spec.family(), spec.rho()) {
        (Family::FPPk, _) => Ok(GeneratorSpec::fppk(k, lam, alpha, m_max)?),
        (Family::FPAk, Some(rho)) => Ok(GeneratorSpec::fpak(k, rho, lam, alpha, m_max)?),
        (f, _) => Err(CliError::usage(format!(
            "family {f}: this command needs fppk or fpak"
        ))),
    }
}

pub fn solve(a: SolveArgs) -> Result<Artifact, CliError> {
    let mut art = Artifact::new("solve");
    let spec = a.spec.build(&mut art)?;
    let g = generator(&spec, a.m_max)?;
    if a.n_points < 2 {
        return Err(CliError::usage("--n-points must be at least 2"));
    }
    art.param("t_end", a.t_end);
    art.param("n_points", a.n_points);
    art.param("m_max", a.m_max);
    let grid = linspace(0.0, a.t_end, a.n_points)?;
    let pmfs = solve_fractional_master(&g, &grid)?;
    let mut cols = vec!["t".to_string()];
    cols.extend((0..=a.m_max).map(|m| format!("p{m}")));
    cols.push("tail".into());
    art.columns(&cols);
    art.rows = grid
        .iter()
        .zip(&pmfs)
        .map(|(&t, p)| {
            let mut row = vec![Cell::from(t)];
            row.extend(p.probs().iter().map(|&v| Cell::from(v)));
            row.push(p.tail_mass_bound().into());
            row
        })
        .collect();
    Ok(art)
}

pub fn check_governing(a: CheckArgs) -> Result<Artifact, CliError> {
    let mut art = Artifact::new("check-governing");
    let spec = a.spec.build(&mut art)?;
    let family = spec.family();
    if !family.is_fractional() {
        return Err(CliError::usage(format!(
            "family {family}: check-governing needs a fractional family"
        )));
    }
    if a.n_points < 2 {
        return Err(CliError::usage("--n-points must be at least 2"));
    }
    let window = (a.window_start, a.window_end.unwrap_or(a.t_end));
    art.param("t_end", a.t_end);
    art.param("n_points", a.n_points);
    art.param("m_max", a.m_max);
    art.param("window_start", window.0);
    art.param("window_end", window.1);
    let grid = linspace(0.0, a.t_end, a.n_points)?;
    let (source, rep) = if family.is_nonhomogeneous() {
        if a.source.is_some() {
            check_flags(family, &[], &["--source"])?;
        }
        let v = a.v.unwrap_or(0.0);
        let tol = a.tol.unwrap_or(1e-10);
        art.param("v", v);
        art.param("tol", tol);
        let rate = parse_rate(a.spec.rate.as_deref().expect("validated"))?;
        let k = spec.k() as usize;
        let alpha = spec.alpha().expect("validated");
        let ns = match spec.rho() {
            Some(rho) => NonhomogeneousSpec::nfpak(k, rho, rate, alpha)?,
            None => NonhomogeneousSpec::fnppk(k, rate, alpha)?,
        };
        (
            "quadrature",
            residual_nonhomogeneous(&ns, v, &grid, a.m_max, window, tol)?,
        )
    } else {
        let extra: Vec<&str> = [a.v.map(|_| "--v"), a.tol.map(|_| "--tol")]
            .into_iter()
            .flatten()
            .collect();
        check_flags(family, &[], &extra)?;
        let g = generator(&spec, a.m_max)?;
        let source = match (a.source, family) {
            (Some(Source::Series), Family::FPAk) => {
                return Err(CliError::usage(
                    "family fpak: --source series is not available, use solver",
                ))
            }
            (Some(s), _) => s,
            (None, Family::FPPk) => Source::Series,
            (None, _) => Source::Solver,
        };
        let pmfs = match source {
            Source::Solver => solve_fractional_master(&g, &grid)?,
            Source::Series => {
                let k = spec.k() as usize;
                let (lam, alpha) = (g.lam(), g.alpha());
                grid.par_iter()
                    .map(|&t| pmf_fppk(k, lam, alpha, t, a.m_max))
                    .collect::<fcount::Result<Vec<_>>>()?
            }
        };
        let name = match source {
            Source::Series => "series",
            Source::Solver => "solver",
        };
        (
            name,
            residual_homogeneous(&g, &pmf_curves(&grid, &pmfs)?, window)?,
        )
    };
    art.param("source", source);
    report_rows(&mut art, &rep);
    Ok(art)
}

fn report_rows(art: &mut Artifact, rep: &ResidualReport) {
    art.columns(&[
        "max_residual",
        "worst_m",
        "worst_t",
        "full_range_residual",
        "window_start",
        "window_end",
        "quadrature_cutoff",
    ]);
    art.rows = vec![vec![
        rep.max_residual.into(),
        rep.worst_m.into(),
        rep.worst_t.into(),
        rep.full_range_residual.into(),
        rep.window.0.into(),
        rep.window.1.into(),
        rep.quadrature_cutoff.into(),
    ]];
}
