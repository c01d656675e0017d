use crate::error::{domain, Result};

/// Event times and jump sizes of one realization on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    event_times: Vec<f64>,
    jump_sizes: Vec<u32>,
    horizon: f64,
    cumulative: Vec<u64>,
}

impl SamplePath {
    pub fn new(event_times: Vec<f64>, jump_sizes: Vec<u32>, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return domain(format!("horizon must be finite and positive, got {horizon}"));
        }
        if event_times.len() != jump_sizes.len() {
            return domain("event times and jump sizes differ in length");
        }
        if event_times.iter().any(|&t| !(t > 0.0 && t <= horizon)) {
            return domain("event times must lie in (0, horizon]");
        }
        if event_times.windows(2).any(|w| w[1] <= w[0]) {
            return domain("event times must be strictly increasing");
        }
        if jump_sizes.contains(&0) {
            return domain("jump sizes must be at least 1");
        }
        Ok(Self::from_parts(event_times, jump_sizes, horizon))
    }

    pub(crate) fn from_parts(event_times: Vec<f64>, jump_sizes: Vec<u32>, horizon: f64) -> Self {
        let mut acc = 0u64;
        let cumulative = jump_sizes
            .iter()
            .map(|&j| {
                acc += j as u64;
                acc
            })
            .collect();
        Self {
            event_times,
            jump_sizes,
            horizon,
            cumulative,
        }
    }

    pub fn event_times(&self) -> &[f64] {
        &self.event_times
    }

    pub fn jump_sizes(&self) -> &[u32] {
        &self.jump_sizes
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `N(t)`, the sum of jumps at times `<= t`.
    pub fn count_at(&self, t: f64) -> u64 {
        let n = self.event_times.partition_point(|&e| e <= t);
        if n == 0 {
            0
        } else {
            self.cumulative[n - 1]
        }
    }

    pub fn counts_on(&self, grid: &[f64]) -> Result<CountGrid> {
        let counts = grid.iter().map(|&t| self.count_at(t)).collect();
        CountGrid::new(grid.to_vec(), counts)
    }
}

/// Counts of one realization read on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CountGrid {
    grid: Vec<f64>,
    counts: Vec<u64>,
}

impl CountGrid {
    pub fn new(grid: Vec<f64>, counts: Vec<u64>) -> Result<Self> {
        check_grid(&grid)?;
        if grid.len() != counts.len() {
            return domain("grid and counts differ in length");
        }
        if counts.windows(2).any(|w| w[1] < w[0]) {
            return domain("counts must be nondecreasing");
        }
        if grid[0] == 0.0 && counts[0] != 0 {
            return domain("count at time 0 must be 0");
        }
        Ok(Self { grid, counts })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn into_counts(self) -> Vec<u64> {
        self.counts
    }
}

/// Nonempty, finite, nonnegative and nondecreasing.
pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return domain("grid must not be empty");
    }
    if grid.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return domain("grid times must be finite and nonnegative");
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return domain("grid must be nondecreasing");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_function() {
        let p = SamplePath::new(vec![0.5, 1.0, 2.0], vec![2, 1, 3], 3.0).unwrap();
        assert_eq!(p.count_at(0.0), 0);
        assert_eq!(p.count_at(0.5), 2);
        assert_eq!(p.count_at(1.5), 3);
        assert_eq!(p.count_at(3.0), 6);
        let g = p.counts_on(&[0.0, 1.0, 3.0]).unwrap();
        assert_eq!(g.counts(), &[0, 3, 6]);
    }

    #[test]
    fn invariants_enforced() {
        assert!(SamplePath::new(vec![1.0, 0.5], vec![1, 1], 2.0).is_err());
        assert!(SamplePath::new(vec![3.0], vec![1], 2.0).is_err());
        assert!(SamplePath::new(vec![1.0], vec![0], 2.0).is_err());
        assert!(CountGrid::new(vec![0.0, 1.0], vec![1, 2]).is_err());
        assert!(CountGrid::new(vec![0.0, 1.0], vec![0, 2, 3]).is_err());
        assert!(CountGrid::new(vec![0.5, 1.0], vec![3, 2]).is_err());
        assert!(CountGrid::new(vec![], vec![]).is_err());
    }
}
