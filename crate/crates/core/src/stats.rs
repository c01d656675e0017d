//! Goodness-of-fit tests used to compare samplers with each other and with
//! exact pmfs.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{domain, Result};

/// Outcome of a two-sample Kolmogorov-Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    /// Rejection threshold at the requested level.
    pub critical: f64,
    pub rejected: bool,
}

/// Asymptotic coefficient `c(level)` with threshold
/// `c sqrt((n + m) / (n m))`, `c = sqrt(-ln(level / 2) / 2)`.
pub fn ks_coefficient(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return domain(format!("level must lie in (0, 1), got {level}"));
    }
    Ok((-(level / 2.0).ln() / 2.0).sqrt())
}

/// Two-sample KS test. Ties (integer counts) are handled by comparing the
/// empirical CDFs only at distinct values, which keeps the test
/// conservative for discrete data.
pub fn ks_two_sample(a: &[f64], b: &[f64], level: f64) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return domain("KS test needs two nonempty samples");
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return domain("KS samples contain NaN");
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0_f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let critical = ks_coefficient(level)? * ((n + m) / (n * m)).sqrt();
    Ok(KsResult {
        statistic: d,
        critical,
        rejected: d > critical,
    })
}

/// Outcome of a chi-square goodness-of-fit test.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Merged bins as `(first value, last value)`; the last bin is open.
    pub bins: Vec<(usize, usize)>,
}

impl ChiSquareResult {
    pub fn rejected(&self, level: f64) -> bool {
        self.p_value < level
    }
}

/// Chi-square test of integer samples against pmf `probs` (values
/// `0..probs.len()`, with everything above pooled into the last bin).
/// Adjacent values are merged until every bin expects at least 5 counts.
pub fn chi_square_gof(samples: &[u64], probs: &[f64]) -> Result<ChiSquareResult> {
    if samples.is_empty() || probs.is_empty() {
        return domain("chi-square test needs samples and a pmf");
    }
    let n = samples.len() as f64;
    let top = probs.len() - 1;
    let mut observed = vec![0.0; probs.len()];
    for &s in samples {
        observed[(s as usize).min(top)] += 1.0;
    }
    let mut expected: Vec<f64> = probs.iter().map(|p| p * n).collect();
    // the last bin is the upper tail
    let head: f64 = probs[..top].iter().sum();
    expected[top] = (1.0 - head).max(0.0) * n;

    let mut bins = Vec::new();
    let (mut obs, mut exp, mut start) = (0.0, 0.0, 0);
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for v in 0..=top {
        obs += observed[v];
        exp += expected[v];
        if exp >= 5.0 {
            merged.push((obs, exp));
            bins.push((start, v));
            obs = 0.0;
            exp = 0.0;
            start = v + 1;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match merged.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
                bins.last_mut().expect("bins track merged").1 = top;
            }
            None => {
                merged.push((obs, exp));
                bins.push((start, top));
            }
        }
    }
    if merged.len() < 2 {
        return domain("chi-square test needs at least two bins with expected count 5");
    }
    let statistic: f64 = merged.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = merged.len() - 1;
    let p_value = ChiSquared::new(dof as f64)
        .map(|c| c.sf(statistic))
        .unwrap_or(0.0);
    Ok(ChiSquareResult {
        statistic,
        dof,
        p_value,
        bins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_one_percent_coefficient() {
        assert!((ks_coefficient(0.01).unwrap() - 1.6276).abs() < 1e-4);
    }

    #[test]
    fn identical_samples_do_not_reject() {
        let a: Vec<f64> = (0..100).map(|i| (i % 7) as f64).collect();
        let r = ks_two_sample(&a, &a, 0.01).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(!r.rejected);
    }

    #[test]
    fn shifted_samples_reject() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 300.0).collect();
        let r = ks_two_sample(&a, &b, 0.01).unwrap();
        assert!((r.statistic - 0.3).abs() < 1e-12 && r.rejected);
    }

    #[test]
    fn chi_square_exact_frequencies() {
        let probs = [0.25, 0.5, 0.25];
        let samples: Vec<u64> = [0u64; 25]
            .iter()
            .chain(&[1; 50])
            .chain(&[2; 25])
            .copied()
            .collect();
        let r = chi_square_gof(&samples, &probs).unwrap();
        assert!(r.statistic.abs() < 1e-12);
        assert_eq!(r.dof, 2);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_merges_sparse_bins() {
        let probs = [0.9, 0.05, 0.03, 0.02];
        let samples = vec![0u64; 100];
        let r = chi_square_gof(&samples, &probs).unwrap();
        assert_eq!(r.bins, vec![(0, 0), (1, 3)]);
        assert!(r.rejected(0.01));
    }
}
