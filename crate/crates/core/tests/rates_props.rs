use fcount::RateFunction;
use proptest::prelude::*;

fn rates() -> Vec<RateFunction> {
    vec![
        RateFunction::constant(2.0).unwrap(),
        RateFunction::weibull(2.0, 2.0).unwrap(),
        RateFunction::weibull(1.0, 0.5).unwrap(),
        RateFunction::makeham(1.0, 1.0, 0.5).unwrap(),
        RateFunction::table(vec![0.0, 1.0, 2.5], vec![1.0, 3.0, 0.5]).unwrap(),
    ]
}

#[test]
fn documented_inverses() {
    assert_eq!(
        RateFunction::weibull(2.0, 2.0)
            .unwrap()
            .invert_cum_mass(1.0)
            .unwrap(),
        2.0
    );
    assert_eq!(
        RateFunction::constant(2.0).unwrap().invert_cum_mass(3.0).unwrap(),
        1.5
    );
    for r in rates() {
        assert_eq!(r.invert_cum_mass(0.0).unwrap(), 0.0);
    }
}

#[test]
fn unit_shape_weibull_is_constant() {
    let w = RateFunction::weibull(4.0, 1.0).unwrap();
    let c = RateFunction::constant(0.25).unwrap();
    for &t in &[0.0, 0.3, 2.0, 11.0] {
        assert!((w.rate_at(t).unwrap() - c.rate_at(t).unwrap()).abs() < 1e-15);
        assert!((w.cum_mass(0.0, t).unwrap() - c.cum_mass(0.0, t).unwrap()).abs() < 1e-14);
    }
}

#[test]
fn table_loads_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rate.csv");
    std::fs::write(&path, "time,rate\n0,1.5\n2,0.5\n").unwrap();
    let r = RateFunction::table_from_csv(&path).unwrap();
    assert!((r.cum_mass(0.0, 3.0).unwrap() - 3.5).abs() < 1e-14);
    assert!((r.invert_cum_mass(3.25).unwrap() - 2.5).abs() < 1e-14);
}

proptest! {
    #[test]
    fn cumulative_mass_is_additive_and_monotone(a in 0.0f64..3.0, d1 in 0.0f64..2.0, d2 in 0.0f64..2.0) {
        let (b, c) = (a + d1, a + d1 + d2);
        for r in rates() {
            let ab = r.cum_mass(a, b).unwrap();
            let bc = r.cum_mass(b, c).unwrap();
            let ac = r.cum_mass(a, c).unwrap();
            prop_assert!((ab + bc - ac).abs() <= 1e-12 * ac.max(1.0));
            prop_assert!(ab >= 0.0 && bc >= 0.0);
        }
    }

    #[test]
    fn inverse_is_a_right_inverse(y in 0.0f64..20.0) {
        for r in rates() {
            let t = r.invert_cum_mass(y).unwrap();
            prop_assert!((r.cum_mass(0.0, t).unwrap() - y).abs() <= 1e-10 * y.max(1.0));
        }
    }
}
