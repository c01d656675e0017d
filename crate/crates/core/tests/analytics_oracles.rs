use fcount::analytics::{
    correlation_curve, empirical_from_samples, inv_sub_cov, inv_sub_moment, inv_sub_var, log_grid,
    lrd_constant, lrd_fit, lrd_report, moments_fnppk, moments_fpak, moments_fppk, moments_nfpak, moments_pak,
    moments_ppk,
};
use fcount::quad::{integrate, QuadConfig};
use fcount::specfun::gamma;
use fcount::{ensemble, CovarianceMc, MomentMethod, ProcessSpec, RateFunction, SimOptions};

/// Covariance of the inverse subordinator straight from the product-moment
/// integral, with the singular endpoint handled by a split.
fn cov_direct(a: f64, t: f64, s: f64) -> f64 {
    let m = t.min(s);
    let cfg = QuadConfig::new(1e-14, 1e-12);
    let f = |x: f64| ((t - x).powf(a) + (s - x).powf(a)) * x.powf(a - 1.0);
    let i = integrate(f, 0.0, m / 2.0, &cfg).unwrap() + integrate(f, m / 2.0, m, &cfg).unwrap();
    i / (gamma(1.0 + a).unwrap() * gamma(a).unwrap()) - (s * t).powf(a) / gamma(1.0 + a).unwrap().powi(2)
}

#[test]
fn subordinator_covariance_matches_product_moment_form() {
    for &a in &[0.3, 0.5, 0.7, 0.9] {
        for &(t, s) in &[(1.0, 0.5), (2.0, 1.0), (0.7, 3.0)] {
            let c = inv_sub_cov(a, t, s).unwrap();
            let d = cov_direct(a, t, s);
            assert!(
                (c - d).abs() < 1e-6 * d.abs().max(1.0),
                "a={a} t={t} s={s}: {c} vs {d}"
            );
        }
        for &t in &[0.5, 1.0, 2.0] {
            assert!((inv_sub_cov(a, t, t).unwrap() - inv_sub_var(a, t).unwrap()).abs() < 1e-8);
        }
    }
}

#[test]
fn pak_moments_follow_textbook_formulas() {
    let (k, rho, lam, t) = (4, 0.35f64, 1.3, 2.0);
    let denom = 1.0 - rho.powi(k);
    let mean: f64 = lam * t * ((0..k).map(|j| rho.powi(j)).sum::<f64>() - k as f64 * rho.powi(k)) / denom;
    let var: f64 = lam * t / denom
        * ((0..k).map(|j| (2 * j + 1) as f64 * rho.powi(j)).sum::<f64>() - (k * k) as f64 * rho.powi(k));
    let r = moments_pak(k as u32, rho, lam, t, None).unwrap();
    assert!((r.mean - mean).abs() < 1e-12 && (r.variance - var).abs() < 1e-12);
}

#[test]
fn reduction_lattice_of_moments() {
    let mc = CovarianceMc::default();
    let constant = RateFunction::constant(1.2).unwrap();
    let base = moments_ppk(1, 1.2, 1.7, Some(0.6)).unwrap();
    let all = [
        moments_fppk(1, 1.2, 1.0, 1.7, Some(0.6)).unwrap(),
        moments_pak(1, 0.0, 1.2, 1.7, Some(0.6)).unwrap(),
        moments_fpak(1, 0.0, 1.2, 1.0, 1.7, Some(0.6)).unwrap(),
        moments_fnppk(1, &constant, 1.0, 1.7, Some(0.6), &mc).unwrap(),
        moments_nfpak(1, 0.0, &constant, 1.0, 1.7, Some(0.6), &mc).unwrap(),
    ];
    for r in all {
        assert!((r.mean - base.mean).abs() < 1e-12);
        assert!((r.variance - base.variance).abs() < 1e-12);
        assert!((r.covariance.unwrap() - base.covariance.unwrap()).abs() < 1e-12);
    }
    // a fractional process with constant rate is the fractional homogeneous one
    let f = moments_fnppk(2, &constant, 0.6, 1.5, Some(0.5), &mc).unwrap();
    let g = moments_fppk(2, 1.2, 0.6, 1.5, Some(0.5)).unwrap();
    assert_eq!(f, g);
}

#[test]
fn monte_carlo_covariance_matches_closed_form() {
    // a one-knot table is constant but not recognized as such
    let flat = RateFunction::table(vec![0.0], vec![2.0]).unwrap();
    let mc = CovarianceMc {
        n_paths: 100_000,
        seed: 3,
        step: Some(1e-3),
    };
    let r = moments_fnppk(2, &flat, 0.7, 1.5, Some(0.8), &mc).unwrap();
    assert_eq!(r.method, MomentMethod::MonteCarloCovariance);
    let exact = moments_fppk(2, 2.0, 0.7, 1.5, Some(0.8)).unwrap();
    assert!((r.mean - exact.mean).abs() < 1e-8 * exact.mean);
    assert!((r.variance - exact.variance).abs() < 1e-7 * exact.variance);
    let se = r.standard_errors.unwrap().covariance.unwrap();
    let cov = exact.covariance.unwrap();
    assert!(
        (r.covariance.unwrap() - cov).abs() < 4.0 * se + 0.01 * cov,
        "{r:?} vs {cov}"
    );
}

#[test]
fn lrd_exponents_on_exact_curves() {
    let ts = log_grid(1e2, 1e4, 41).unwrap();
    for (spec, a) in [
        (ProcessSpec::fppk(2, 1.0, 0.7).unwrap(), 0.7),
        (ProcessSpec::fpak(2, 0.3, 1.0, 0.6).unwrap(), 0.6),
    ] {
        let r = lrd_report(&spec, 1.0, &ts, (1e2, 1e4)).unwrap();
        assert!((r.fitted_exponent + a).abs() < 0.03, "{spec}: {r:?}");
        assert!(r.theoretical_constant.is_some());
    }
}

#[test]
fn correlation_times_power_tends_to_constant() {
    let spec = ProcessSpec::fppk(1, 1.0, 0.5).unwrap();
    let c = lrd_constant(&spec, 1.0).unwrap();
    let ts = [1e3, 1e5, 1e7];
    let curve = correlation_curve(&spec, 1.0, &ts).unwrap();
    let dev: Vec<f64> = curve
        .values()
        .iter()
        .zip(ts)
        .map(|(v, t)| (v * t.sqrt() / c - 1.0).abs())
        .collect();
    assert!(dev[0] > dev[1] && dev[1] > dev[2] && dev[2] < 1e-3, "{dev:?}");
    assert!(lrd_constant(&ProcessSpec::ppk(1, 1.0).unwrap(), 1.0).is_err());
}

#[test]
fn standard_errors_shrink_like_inverse_root_n() {
    let spec = ProcessSpec::fppk(2, 1.0, 0.8).unwrap();
    let e = ensemble(5, &spec, 100_000, &[0.0, 1.0], &SimOptions::default()).unwrap();
    let col: Vec<f64> = e.column(1).iter().map(|&c| c as f64).collect();
    let pts: Vec<(f64, f64)> = [1_000usize, 10_000, 100_000]
        .iter()
        .map(|&n| {
            let se = empirical_from_samples(&col[..n], None)
                .standard_errors
                .unwrap()
                .mean;
            ((n as f64).ln(), se.ln())
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 0.5).abs() < 0.05, "slope {slope}");
}

#[test]
fn fit_rejects_degenerate_input() {
    let g = fcount::GridFunction::new(vec![1.0, 2.0], vec![1.0, -1.0]).unwrap();
    assert!(lrd_fit(&g, (0.5, 3.0)).is_err());
    assert!(lrd_fit(&g, (3.0, 0.5)).is_err());
    assert!(inv_sub_moment(0.5, -1.0, 1.0).is_err());
    assert!(correlation_curve(
        &ProcessSpec::nppk(1, RateFunction::constant(1.0).unwrap()).unwrap(),
        1.0,
        &[2.0]
    )
    .is_err());
}
