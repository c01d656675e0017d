use std::f64::consts::PI;

use crate::error::{domain, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `sin(pi * x)` with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    if x == x.trunc() {
        return 0.0;
    }
    let r = x.rem_euclid(2.0);
    (PI * r).sin()
}

/// ln Γ(x) for x > 0, unchecked.
pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the Lanczos sum in its accurate range.
        return (PI / sin_pi(x)).ln() - ln_gamma_pos(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Natural logarithm of the gamma function on the positive half-line.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("log_gamma requires a finite positive argument, got {x}"));
    }
    Ok(ln_gamma_pos(x))
}

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> Result<f64> {
    if let Some(f) = factorial_of(x) {
        return Ok(f);
    }
    Ok(log_gamma(x)?.exp())
}

/// Γ(x) for positive integers up to 171, computed exactly as a product.
fn factorial_of(x: f64) -> Option<f64> {
    if (1.0..=171.0).contains(&x) && x == x.trunc() {
        Some((2..x as u32).fold(1.0, |acc, i| acc * i as f64))
    } else {
        None
    }
}

/// 1/Γ(x) on the whole real line (zero at the non-positive integers).
pub fn recip_gamma(x: f64) -> f64 {
    if let Some(f) = factorial_of(x) {
        return 1.0 / f;
    }
    if x > 0.0 {
        return (-ln_gamma_pos(x)).exp();
    }
    if x == x.trunc() {
        return 0.0;
    }
    // 1/Γ(x) = Γ(1-x) sin(pi x) / pi
    sin_pi(x) * (ln_gamma_pos(1.0 - x)).exp() / PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-15);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-15);
        assert!((log_gamma(5.0).unwrap() - 24f64.ln()).abs() < 1e-13);
        assert!((log_gamma(0.5).unwrap() - 0.5 * PI.ln()).abs() < 1e-14);
        assert!((gamma(1.5).unwrap() - PI.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn matches_factorials_to_twelve_digits() {
        let mut fact = 1.0_f64;
        for n in 1..=170u32 {
            if n > 1 {
                fact *= (n - 1) as f64;
            }
            let lg = log_gamma(n as f64).unwrap();
            let exact = fact.ln();
            assert!(
                (lg - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                "n={n}: {lg} vs {exact}"
            );
        }
    }

    #[test]
    fn tiny_arguments() {
        // Γ(x) ~ 1/x - γ_E for small x
        let x: f64 = 1e-3;
        let approx = (1.0 / x - 0.577_215_664_901_532_9 + 0.989_055_995_327_972_6 * x).ln();
        assert!((log_gamma(x).unwrap() - approx).abs() < 1e-9);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn reciprocal_gamma_negative_arguments() {
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_eq!(recip_gamma(-3.0), 0.0);
        // Γ(-0.5) = -2 sqrt(pi)
        assert!((recip_gamma(-0.5) + 1.0 / (2.0 * PI.sqrt())).abs() < 1e-14);
        // Γ(-1.5) = 4 sqrt(pi) / 3
        assert!((recip_gamma(-1.5) - 3.0 / (4.0 * PI.sqrt())).abs() < 1e-14);
    }
}
