//! Deterministic path-space transforms: Lamperti, scaling, dilation and
//! n-fold independent sums.

use crate::error::{contract, domain, Result};
use crate::grid::{Axis, TimeGrid};
use crate::processes::{generate, PathEnsemble, ProcessSpec};
use crate::randkit::RngState;

const SOURCE_GRID_KEY: &str = "lamperti_source_grid";
const LAMPERTI_ALPHA_KEY: &str = "lamperti_alpha";

/// `Ỹ_j = e^{-α y_j / 2} X_{e^{y_j}}`; the ensemble must already be
/// observed at the times `e^{y_j}` (to 1e-12, relative).
pub fn lamperti_apply(e: &PathEnsemble, alpha: f64, y_grid: &[f64]) -> Result<PathEnsemble> {
    let times = e.grid().points();
    if times.len() != y_grid.len() {
        return contract(format!("lamperti: grid has {} points, y grid has {}", times.len(), y_grid.len()));
    }
    for (&t, &y) in times.iter().zip(y_grid) {
        let target = y.exp();
        if (t - target).abs() > 1e-12 * target.max(1.0) {
            return contract(format!("lamperti: grid time {t} does not match e^{y} = {target}"));
        }
    }
    let factors: Vec<f64> = y_grid.iter().map(|y| (-alpha * y / 2.0).exp()).collect();
    let values = scale_columns(e, &factors, |x, f| x * f);
    e.rebuild(
        TimeGrid::log_axis(y_grid.to_vec())?,
        values,
        &[
            (SOURCE_GRID_KEY, serde_json::to_string(times).expect("grid serializes")),
            (LAMPERTI_ALPHA_KEY, format!("{alpha:?}")),
        ],
    )
}

/// Undoes [`lamperti_apply`]: divides by the same factors and restores the
/// recorded source grid.
pub fn lamperti_invert(e: &PathEnsemble) -> Result<PathEnsemble> {
    if e.grid().axis() != Axis::LogTime {
        return contract("lamperti_invert needs a log-time ensemble");
    }
    let alpha: f64 = e
        .meta()
        .get(LAMPERTI_ALPHA_KEY)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| crate::IdtError::Contract("ensemble carries no Lamperti exponent".into()))?;
    let ys = e.grid().points();
    let times: Vec<f64> = match e.meta().get(SOURCE_GRID_KEY) {
        Some(s) => serde_json::from_str(s).map_err(|err| crate::IdtError::Format(err.to_string()))?,
        None => ys.iter().map(|y| y.exp()).collect(),
    };
    let factors: Vec<f64> = ys.iter().map(|y| (-alpha * y / 2.0).exp()).collect();
    let values = scale_columns(e, &factors, |x, f| x / f);
    let mut meta = e.meta().clone();
    meta.remove(SOURCE_GRID_KEY);
    meta.remove(LAMPERTI_ALPHA_KEY);
    PathEnsemble::from_parts(TimeGrid::new(times)?, e.n_paths(), values, e.spec().clone(), e.seed(), meta)
}

fn scale_columns(e: &PathEnsemble, factors: &[f64], op: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    e.rows()
        .flat_map(|r| r.iter().zip(factors).map(|(&x, &f)| op(x, f)).collect::<Vec<_>>())
        .collect()
}

/// Every value multiplied by `c`.
pub fn scale_paths(e: &PathEnsemble, c: f64) -> Result<PathEnsemble> {
    let values = e.values().iter().map(|x| x * c).collect();
    e.rebuild(e.grid().clone(), values, &[])
}

/// Relabels `X_{a t}` as a process in `t`: values unchanged, grid divided
/// by `a`.
pub fn dilate_grid(e: &PathEnsemble, a: f64) -> Result<PathEnsemble> {
    if !(a > 0.0) {
        return domain(format!("dilation factor must be positive, got {a}"));
    }
    e.rebuild(e.grid().divided(a)?, e.values().to_vec(), &[])
}

/// Pointwise sum of `n` independent ensembles of `spec`. Copy 0 uses `rng`
/// itself, copy `k` uses `rng.fork(k)`.
pub fn sum_independent(spec: &ProcessSpec, n: usize, grid: &TimeGrid, n_paths: usize, rng: &RngState) -> Result<PathEnsemble> {
    if n == 0 {
        return domain("sum_independent needs n >= 1");
    }
    let first = generate(spec, grid, n_paths, rng)?;
    let mut acc = first.values().to_vec();
    for k in 1..n {
        let copy = generate(spec, grid, n_paths, &rng.fork(k as u64))?;
        for (a, b) in acc.iter_mut().zip(copy.values()) {
            *a += b;
        }
    }
    first.rebuild(grid.clone(), acc, &[("summed_copies", n.to_string())])
}
