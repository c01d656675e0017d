use super::gamma::ln_gamma_pos;
use crate::error::{Error, Result};

/// Values of a function sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Shape(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::Domain("grid points must be finite and nonnegative".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("grid must be strictly increasing".into()));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` on `n` equally spaced points covering `[a, b]`.
    pub fn sample(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 || !(b > a) {
            return Err(Error::Shape(format!(
                "need n >= 2 and b > a (got n={n}, [{a}, {b}])"
            )));
        }
        let grid: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
        let values = grid.iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// L1 weights `b_j = (j+1)^{1-a} - j^{1-a}` for `j < n`.
pub(crate) fn l1_weights(alpha: f64, n: usize) -> Vec<f64> {
    let e = 1.0 - alpha;
    (0..n)
        .map(|j| {
            let j = j as f64;
            (j + 1.0).powf(e) - j.powf(e)
        })
        .collect()
}

/// Spacing of a uniform grid, or a domain error.
pub(crate) fn uniform_step(grid: &[f64]) -> Result<f64> {
    let dt = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(w[1].abs() * 1e-6) {
            return Err(Error::Domain("the L1 scheme needs a uniform grid".into()));
        }
    }
    Ok(dt)
}

/// Caputo derivative of order `alpha` by the L1 scheme, returned on `grid[1..]`.
/// For `alpha = 1` this is the backward difference.
pub fn caputo_l1(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("order must lie in (0, 1], got {alpha}")));
    }
    if f.len() < 2 {
        return Err(Error::Shape(format!(
            "L1 scheme needs at least 2 points, got {}",
            f.len()
        )));
    }
    let dt = uniform_step(&f.grid)?;
    let n = f.len();
    let diffs: Vec<f64> = f.values.windows(2).map(|w| w[1] - w[0]).collect();
    let out = if alpha == 1.0 {
        diffs.iter().map(|d| d / dt).collect()
    } else {
        let mu = (-alpha * dt.ln() - ln_gamma_pos(2.0 - alpha)).exp();
        let b = l1_weights(alpha, n - 1);
        (1..n)
            .map(|i| {
                // sum_j b_j (f_{i-j} - f_{i-j-1})
                let s: f64 = (0..i).map(|j| b[j] * diffs[i - 1 - j]).sum();
                mu * s
            })
            .collect()
    };
    GridFunction::new(f.grid[1..].to_vec(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma;

    fn max_err_power(mu: f64, alpha: f64, n: usize) -> f64 {
        let f = GridFunction::sample(0.0, 2.0, n, |t| t.powf(mu)).unwrap();
        let d = caputo_l1(&f, alpha).unwrap();
        let c = gamma(mu + 1.0).unwrap() / gamma(mu - alpha + 1.0).unwrap();
        d.grid()
            .iter()
            .zip(d.values())
            .map(|(t, v)| (v - c * t.powf(mu - alpha)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn constant_has_zero_derivative() {
        let f = GridFunction::sample(0.0, 1.0, 50, |_| 3.0).unwrap();
        let d = caputo_l1(&f, 0.4).unwrap();
        assert!(d.values().iter().all(|v| *v == 0.0));
        assert_eq!(d.len(), 49);
    }

    #[test]
    fn linear_function_is_exact() {
        let err = max_err_power(1.0, 0.5, 1000);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn first_order_on_square() {
        let f = GridFunction::sample(0.0, 1.0, 101, |t| t * t).unwrap();
        let d = caputo_l1(&f, 1.0).unwrap();
        for (t, v) in d.grid().iter().zip(d.values()) {
            assert!((v - 2.0 * t).abs() <= 0.0101);
        }
    }

    #[test]
    fn converges_on_powers() {
        for &(mu, alpha) in &[(2.0, 0.5), (1.5, 0.3), (2.0, 0.8)] {
            let e1 = max_err_power(mu, alpha, 201);
            let e2 = max_err_power(mu, alpha, 401);
            let order = (e1 / e2).log2();
            assert!(order >= 1.0, "mu={mu} alpha={alpha}: order {order}");
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let f = GridFunction::new(vec![0.0, 0.1, 0.3], vec![0.0; 3]).unwrap();
        assert!(caputo_l1(&f, 0.5).is_err());
        let f = GridFunction::new(vec![0.0], vec![1.0]).unwrap();
        assert!(matches!(caputo_l1(&f, 0.5), Err(Error::Shape(_))));
        assert!(GridFunction::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(GridFunction::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }
}
