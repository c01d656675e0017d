use fcount::quad::{integrate, QuadConfig};
use fcount::specfun::{
    caputo_l1, gamma, inv_subordinator_density, log_gamma, mittag_leffler, prabhakar_ml, stable_density,
    GridFunction,
};
use proptest::prelude::*;

/// Integral over `(0, ∞)` split geometrically so every panel is well scaled.
fn integrate_half_line(f: impl Fn(f64) -> f64 + Copy, lo: f64, hi: f64) -> f64 {
    let cfg = QuadConfig::new(1e-13, 1e-11);
    let mut total = integrate(f, 0.0, lo, &cfg).unwrap();
    let mut a = lo;
    while a < hi {
        let b = a * 2.0;
        total += integrate(f, a, b, &cfg).unwrap();
        a = b;
    }
    total
}

#[test]
fn exponential_and_cosine_special_cases() {
    for i in 0..=50 {
        let z = -20.0 + 0.5 * i as f64;
        let e = mittag_leffler(1.0, 1.0, z).unwrap();
        assert!((e - z.exp()).abs() < 1e-8, "z={z}");
    }
    // E_{1,2}(z) = (e^z - 1) / z
    for &z in &[-15.0, -2.0, -0.1, 0.3, 3.0] {
        let e = mittag_leffler(1.0, 2.0, z).unwrap();
        assert!((e - f64::exp_m1(z) / z).abs() < 1e-12, "z={z}");
    }
}

#[test]
fn half_order_matches_scaled_complementary_error_function() {
    // E_{1/2}(-x) = e^{x^2} erfc(x) = (2/√π) ∫_0^∞ e^{-u^2 - 2xu} du
    for &x in &[0.3, 1.0, 4.0, 12.0, 40.0] {
        let f = |u: f64| (-u * u - 2.0 * x * u).exp();
        let oracle = 2.0 / std::f64::consts::PI.sqrt() * integrate_half_line(f, 1e-3, 64.0);
        let e = mittag_leffler(0.5, 1.0, -x).unwrap();
        assert!(
            (e - oracle).abs() < 1e-10 * oracle.max(1e-3),
            "x={x}: {e} vs {oracle}"
        );
    }
}

#[test]
fn prabhakar_with_unit_third_parameter_is_two_parameter() {
    for &(a, b) in &[(0.3, 1.0), (0.6, 1.4), (0.9, 2.0)] {
        for &z in &[-7.5, -3.0, -0.5, 0.0, 1.0, 4.0] {
            let p = prabhakar_ml(a, b, 1.0, z).unwrap();
            let m = mittag_leffler(a, b, z).unwrap();
            assert!((p - m).abs() < 1e-10, "a={a} b={b} z={z}");
        }
    }
}

#[test]
fn stable_density_normalizes() {
    for &a in &[0.3, 0.5, 0.7, 0.9] {
        let mut top: f64 = 1e-3;
        while top < 1e7 {
            top *= 2.0;
        }
        let head = integrate_half_line(|x| stable_density(a, x).unwrap_or(0.0), 1e-3, 1e7);
        // P[S > X] ~ X^{-a} / Γ(1-a)
        let tail = top.powf(-a) / gamma(1.0 - a).unwrap();
        assert!((head + tail - 1.0).abs() < 1e-4, "a={a}: {head} + {tail}");
        let h_mass = integrate_half_line(|x| inv_subordinator_density(a, 1.0, x).unwrap(), 1e-3, 64.0);
        assert!((h_mass - 1.0).abs() < 1e-4, "a={a}: {h_mass}");
    }
}

#[test]
fn subordinator_density_laplace_transform_in_time() {
    // ∫ e^{-st} h(t, x) dt = s^{a-1} e^{-x s^a}
    for &a in &[0.3, 0.5, 0.7, 0.9] {
        for &(s, x) in &[(1.0, 0.5), (2.0, 1.0), (0.5, 2.0)] {
            let f = |t: f64| {
                if t == 0.0 {
                    0.0
                } else {
                    (-s * t).exp() * inv_subordinator_density(a, t, x).unwrap()
                }
            };
            let lt = integrate_half_line(f, 1e-3, 80.0 / s);
            let exact = s.powf(a - 1.0) * (-x * s.powf(a)).exp();
            assert!((lt - exact).abs() < 1e-4, "a={a} s={s} x={x}: {lt} vs {exact}");
        }
    }
}

#[test]
fn caputo_of_power_converges_at_first_order() {
    let err = |n: usize| {
        let f = GridFunction::sample(0.0, 2.0, n, |t| t * t).unwrap();
        let d = caputo_l1(&f, 0.6).unwrap();
        let c = gamma(3.0).unwrap() / gamma(2.4).unwrap();
        d.grid()
            .iter()
            .zip(d.values())
            .map(|(t, v)| (v - c * t.powf(1.4)).abs())
            .fold(0.0, f64::max)
    };
    let (e1, e2, e3) = (err(201), err(401), err(801));
    assert!(e2 < e1 && e3 < e2);
    let order = (e2 / e3).log2();
    assert!(order >= 1.0, "order {order}");

    let f = GridFunction::sample(0.0, 2.0, 1000, |t| t).unwrap();
    let d = caputo_l1(&f, 0.5).unwrap();
    let c = 1.0 / gamma(1.5).unwrap();
    let worst = d
        .grid()
        .iter()
        .zip(d.values())
        .map(|(t, v)| (v - c * t.sqrt()).abs())
        .fold(0.0, f64::max);
    assert!(worst < 5e-3);
}

#[test]
fn caputo_rejects_short_and_nonuniform_grids() {
    let one = GridFunction::new(vec![0.0], vec![1.0]).unwrap();
    assert!(matches!(caputo_l1(&one, 0.5), Err(fcount::Error::Shape(_))));
    let bad = GridFunction::new(vec![0.0, 0.1, 0.3], vec![0.0; 3]).unwrap();
    assert!(caputo_l1(&bad, 0.5).is_err());
}

proptest! {
    #[test]
    fn log_gamma_recurrence(x in 0.5f64..50.0) {
        let lhs = log_gamma(x + 1.0).unwrap();
        let rhs = log_gamma(x).unwrap() + x.ln();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn mittag_leffler_decreases_on_negative_axis(a in 0.1f64..1.0, x in 0.0f64..60.0, dx in 0.01f64..5.0) {
        let e1 = mittag_leffler(a, 1.0, -x).unwrap();
        let e2 = mittag_leffler(a, 1.0, -(x + dx)).unwrap();
        prop_assert!(e2 <= e1 + 1e-12);
        prop_assert!(e2 > 0.0 && e1 <= 1.0 + 1e-12);
    }

    #[test]
    fn subordinator_density_is_nonnegative(a in 0.05f64..0.99, t in 0.01f64..10.0, x in 1e-3f64..20.0) {
        let h = inv_subordinator_density(a, t, x).unwrap();
        prop_assert!(h >= 0.0 && h.is_finite());
    }
}
