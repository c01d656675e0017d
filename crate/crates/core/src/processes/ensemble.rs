use rayon::prelude::*;

use super::paths::check_grid;
use super::simulate::{simulate_on_grid, SimOptions};
use super::ProcessSpec;
use crate::error::{domain, Result};
use crate::sampling::RngStream;

/// Counts of `n_paths` independent realizations on a common grid; row `i`
/// uses `RngStream::new(seed, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    spec: ProcessSpec,
    grid: Vec<f64>,
    counts: Vec<u64>,
    n_paths: usize,
    seed: u64,
}

impl Ensemble {
    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn n_grid(&self) -> usize {
        self.grid.len()
    }

    pub fn row(&self, i: usize) -> &[u64] {
        let n = self.grid.len();
        &self.counts[i * n..(i + 1) * n]
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.n_paths).map(|i| self.row(i)[j]).collect()
    }

    /// Row-major `n_paths x n_grid` matrix.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// Simulates `n_paths` rows in parallel.
pub fn ensemble(
    seed: u64,
    spec: &ProcessSpec,
    n_paths: usize,
    grid: &[f64],
    opts: &SimOptions,
) -> Result<Ensemble> {
    if n_paths == 0 {
        return domain("n_paths must be at least 1");
    }
    check_grid(grid)?;
    let rows = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(seed, i as u64);
            simulate_on_grid(&mut rng, spec, grid, opts).map(|g| g.into_counts())
        })
        .collect::<Result<Vec<Vec<u64>>>>()?;
    Ok(Ensemble {
        spec: spec.clone(),
        grid: grid.to_vec(),
        counts: rows.concat(),
        n_paths,
        seed,
    })
}
