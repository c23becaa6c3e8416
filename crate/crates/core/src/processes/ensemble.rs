use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::grid::TimeGrid;
use crate::processes::spec::ProcessSpec;

/// `n_paths` sample paths observed on a shared grid, row-major.
///
/// Immutable once built; transforms return new ensembles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathEnsemble {
    grid: TimeGrid,
    n_paths: usize,
    values: Vec<f64>,
    spec: ProcessSpec,
    seed: u64,
    meta: BTreeMap<String, String>,
}

impl PathEnsemble {
    pub fn from_parts(
        grid: TimeGrid,
        n_paths: usize,
        values: Vec<f64>,
        spec: ProcessSpec,
        seed: u64,
        meta: BTreeMap<String, String>,
    ) -> Result<Self> {
        if n_paths == 0 {
            return contract("ensemble needs at least one path");
        }
        if values.len() != n_paths * grid.len() {
            return contract(format!(
                "ensemble has {} values, expected {} paths x {} times",
                values.len(),
                n_paths,
                grid.len()
            ));
        }
        Ok(Self { grid, n_paths, values, spec, seed, meta })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn n_times(&self) -> usize {
        self.grid.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, path: usize, time: usize) -> f64 {
        self.values[path * self.n_times() + time]
    }

    pub fn row(&self, path: usize) -> &[f64] {
        let m = self.n_times();
        &self.values[path * m..(path + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_times())
    }

    pub fn column(&self, time: usize) -> Vec<f64> {
        self.rows().map(|r| r[time]).collect()
    }

    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    /// Same metadata, new grid and values. Shapes must agree.
    pub(crate) fn rebuild(&self, grid: TimeGrid, values: Vec<f64>, notes: &[(&str, String)]) -> Result<Self> {
        let mut meta = self.meta.clone();
        for (k, v) in notes {
            meta.insert(k.to_string(), v.clone());
        }
        Self::from_parts(grid, self.n_paths, values, self.spec.clone(), self.seed, meta)
    }
}
