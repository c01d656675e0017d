//! Deterministic intensities `λ(t)` with cumulative mass `Λ(t) = ∫_0^t λ`.

use std::fmt;
use std::io::Read;
use std::path::Path;

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Constant {
        lambda0: f64,
    },
    Weibull {
        b: f64,
        c: f64,
    },
    Makeham {
        b: f64,
        c: f64,
        mu: f64,
    },
    Table {
        knots: Vec<f64>,
        values: Vec<f64>,
        cum: Vec<f64>,
    },
}

/// A validated rate function. Construct through the named constructors.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFunction {
    kind: Kind,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return domain(format!("{name} must be finite and positive, got {v}"));
    }
    Ok(())
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return domain(format!("{name} must be finite and nonnegative, got {v}"));
    }
    Ok(())
}

impl RateFunction {
    /// `λ(t) = lambda0`.
    pub fn constant(lambda0: f64) -> Result<Self> {
        nonnegative("constant rate", lambda0)?;
        Ok(Self {
            kind: Kind::Constant { lambda0 },
        })
    }

    /// `λ(t) = (c/b)(t/b)^{c-1}`, `Λ(t) = (t/b)^c`.
    ///
    /// `c = 0` is rejected: it would give `Λ(0+) = 1` with zero rate, so `Λ`
    /// would jump at the origin.
    pub fn weibull(b: f64, c: f64) -> Result<Self> {
        positive("Weibull scale b", b)?;
        positive("Weibull shape c", c)?;
        Ok(Self {
            kind: Kind::Weibull { b, c },
        })
    }

    /// `λ(t) = c e^{bt} + mu`.
    pub fn makeham(b: f64, c: f64, mu: f64) -> Result<Self> {
        positive("Makeham b", b)?;
        positive("Makeham c", c)?;
        nonnegative("Makeham mu", mu)?;
        Ok(Self {
            kind: Kind::Makeham { b, c, mu },
        })
    }

    /// Piecewise-constant rate: `values[i]` on `[knots[i], knots[i+1])`, the
    /// last value extending to infinity. `knots[0]` must be 0.
    pub fn table(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() {
            return Err(Error::Shape(format!(
                "rate table needs matching nonempty columns (got {} knots, {} values)",
                knots.len(),
                values.len()
            )));
        }
        if knots[0] != 0.0 {
            return domain(format!("rate table must start at t = 0, got {}", knots[0]));
        }
        if knots.iter().any(|t| !t.is_finite()) || knots.windows(2).any(|w| w[1] <= w[0]) {
            return domain("rate table times must be finite and strictly increasing");
        }
        for &v in &values {
            nonnegative("tabulated rate", v)?;
        }
        let mut cum = vec![0.0; knots.len()];
        for i in 1..knots.len() {
            cum[i] = cum[i - 1] + values[i - 1] * (knots[i] - knots[i - 1]);
        }
        Ok(Self {
            kind: Kind::Table { knots, values, cum },
        })
    }

    /// Reads a two-column `time,rate` CSV; a non-numeric first row is taken as
    /// a header.
    pub fn table_from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::table_from_reader(file)
    }

    pub fn table_from_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut knots = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::Shape(format!(
                    "rate table row {} has {} columns",
                    i + 1,
                    rec.len()
                )));
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(t), Ok(v)) => {
                    knots.push(t);
                    values.push(v);
                }
                _ if i == 0 => continue,
                _ => {
                    return domain(format!("rate table row {} is not numeric", i + 1));
                }
            }
        }
        Self::table(knots, values)
    }

    /// `λ(t)`; `+∞` at `t = 0` for Weibull shapes below 1.
    pub fn rate_at(&self, t: f64) -> Result<f64> {
        nonnegative("time", t)?;
        Ok(self.rate_unchecked(t))
    }

    pub(crate) fn rate_unchecked(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Constant { lambda0 } => *lambda0,
            Kind::Weibull { b, c } => {
                if t == 0.0 {
                    return match c.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => 1.0 / b,
                        _ => 0.0,
                    };
                }
                c / b * (t / b).powf(c - 1.0)
            }
            Kind::Makeham { b, c, mu } => c * (b * t).exp() + mu,
            Kind::Table { knots, values, .. } => values[segment(knots, t)],
        }
    }

    /// `Λ(t)`.
    pub fn cumulative(&self, t: f64) -> Result<f64> {
        nonnegative("time", t)?;
        Ok(self.cumulative_unchecked(t))
    }

    pub(crate) fn cumulative_unchecked(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Constant { lambda0 } => lambda0 * t,
            Kind::Weibull { b, c } => (t / b).powf(*c),
            Kind::Makeham { b, c, mu } => c / b * (b * t).exp_m1() + mu * t,
            Kind::Table { knots, values, cum } => {
                let i = segment(knots, t);
                cum[i] + values[i] * (t - knots[i])
            }
        }
    }

    /// `Λ(s, t) = Λ(t) - Λ(s)`.
    pub fn cum_mass(&self, s: f64, t: f64) -> Result<f64> {
        nonnegative("time", s)?;
        nonnegative("time", t)?;
        if s > t {
            return domain(format!("interval start {s} exceeds end {t}"));
        }
        if s == t {
            return Ok(0.0);
        }
        Ok((self.cumulative_unchecked(t) - self.cumulative_unchecked(s)).max(0.0))
    }

    /// `t` with `Λ(t) = y`.
    pub fn invert_cum_mass(&self, y: f64) -> Result<f64> {
        nonnegative("cumulative mass", y)?;
        if y == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            Kind::Constant { lambda0 } => {
                if *lambda0 == 0.0 {
                    return Err(Error::UnreachableMass {
                        target: y,
                        supremum: 0.0,
                    });
                }
                Ok(y / lambda0)
            }
            Kind::Weibull { b, c } => Ok(b * y.powf(1.0 / c)),
            Kind::Makeham { b, c, mu } => Ok(invert_makeham(*b, *c, *mu, y)),
            Kind::Table { knots, values, cum } => invert_table(knots, values, cum, y),
        }
    }

    /// Upper bound on `λ` over `[0, t]`, when finite.
    pub fn max_rate_on(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Constant { lambda0 } => *lambda0,
            Kind::Weibull { c, .. } if *c < 1.0 => f64::INFINITY,
            Kind::Weibull { .. } | Kind::Makeham { .. } => self.rate_unchecked(t),
            Kind::Table { knots, values, .. } => {
                let last = segment(knots, t);
                values[..=last].iter().copied().fold(0.0, f64::max)
            }
        }
    }

    /// Whether `λ` is the same constant everywhere.
    pub fn constant_value(&self) -> Option<f64> {
        match &self.kind {
            Kind::Constant { lambda0 } => Some(*lambda0),
            Kind::Weibull { b, c } if *c == 1.0 => Some(1.0 / b),
            _ => None,
        }
    }
}

/// Index of the table segment containing `t`.
fn segment(knots: &[f64], t: f64) -> usize {
    knots.partition_point(|&k| k <= t).saturating_sub(1)
}

fn invert_makeham(b: f64, c: f64, mu: f64, y: f64) -> f64 {
    let big_l = |t: f64| c / b * (b * t).exp_m1() + mu * t;
    // Both starting points over-estimate the root, and Λ is convex, so
    // Newton decreases monotonically onto it.
    let mut t = ((b * y / c).ln_1p() / b).min(y / mu.max(f64::MIN_POSITIVE));
    for _ in 0..100 {
        let f = big_l(t) - y;
        if f.abs() <= 1e-13 * (1.0 + y) {
            break;
        }
        let step = f / (c * (b * t).exp() + mu);
        t -= step;
        if step.abs() <= 1e-16 * t.abs() {
            break;
        }
    }
    t.max(0.0)
}

fn invert_table(knots: &[f64], values: &[f64], cum: &[f64], y: f64) -> Result<f64> {
    let n = knots.len();
    let last = values[n - 1];
    if y > cum[n - 1] {
        if last == 0.0 {
            return Err(Error::UnreachableMass {
                target: y,
                supremum: cum[n - 1],
            });
        }
        return Ok(knots[n - 1] + (y - cum[n - 1]) / last);
    }
    // first knot whose cumulative reaches y
    let j = cum.partition_point(|&c| c < y);
    // y lies in (cum[j-1], cum[j]]
    if cum[j] == y {
        let run_end = (j..n).take_while(|&i| cum[i] == y).last().unwrap_or(j);
        let flat_to = if run_end == n - 1 && last == 0.0 {
            f64::INFINITY
        } else {
            knots[run_end]
        };
        if flat_to > knots[j] {
            return Err(Error::AmbiguousInverse {
                target: y,
                from: knots[j],
                to: flat_to,
            });
        }
        return Ok(knots[j]);
    }
    let i = j - 1;
    Ok(knots[i] + (y - cum[i]) / values[i])
}

impl fmt::Display for RateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Constant { lambda0 } => write!(f, "constant:{lambda0}"),
            Kind::Weibull { b, c } => write!(f, "weibull:b={b},c={c}"),
            Kind::Makeham { b, c, mu } => write!(f, "makeham:b={b},c={c},mu={mu}"),
            Kind::Table { knots, .. } => write!(f, "table:{} knots", knots.len()),
        }
    }
}
