//! Monte Carlo thresholds for the distance tests.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::grid::TimeGrid;
use crate::processes::{generate, ProcessSpec};
use crate::randkit::RngState;
use crate::report::TestReport;
use crate::statlab::checks::{
    idt_test_with_mode, selfsimilarity_test, stability_test, stationarity_test, temporal_sd_test, EcfDesign, IdtMode,
};
use crate::transforms::lamperti_apply;

/// A distance test and its hypothesis parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestKind {
    Idt {
        alpha: f64,
        n: u32,
        #[serde(default)]
        mode: IdtMode,
    },
    SelfSimilarity { h: f64, a: f64 },
    Stability { beta: f64, n: u32 },
    TemporalSd { alpha: f64, b: f64 },
    /// Lamperti transform at exponent `alpha` of the process observed at
    /// `e^y` for `y` in `y_grid`; `design.grid` is not used.
    Stationarity { alpha: f64, y_grid: Vec<f64>, window: usize, shift: usize },
}

impl TestKind {
    pub fn name(&self) -> &'static str {
        match self {
            TestKind::Idt { .. } => "idt",
            TestKind::SelfSimilarity { .. } => "selfsimilarity",
            TestKind::Stability { .. } => "stability",
            TestKind::TemporalSd { .. } => "temporal_sd",
            TestKind::Stationarity { .. } => "stationarity",
        }
    }

    pub fn run(&self, spec: &ProcessSpec, design: &EcfDesign, rng: &RngState, threshold: f64) -> Result<TestReport> {
        match self {
            TestKind::Idt { alpha, n, mode } => idt_test_with_mode(spec, *alpha, *n, design, rng, threshold, *mode),
            TestKind::SelfSimilarity { h, a } => selfsimilarity_test(spec, *h, *a, design, rng, threshold),
            TestKind::Stability { beta, n } => stability_test(spec, *beta, *n, design, rng, threshold),
            TestKind::TemporalSd { alpha, b } => temporal_sd_test(spec, *alpha, *b, design, rng, threshold),
            TestKind::Stationarity { alpha, y_grid, window, shift } => {
                let grid = TimeGrid::new(y_grid.iter().map(|y| y.exp()).collect())?;
                let e = generate(spec, &grid, design.n_paths, &rng.fork(1))?;
                let l = lamperti_apply(&e, *alpha, y_grid)?;
                Ok(stationarity_test(&l, *window, *shift, &[], threshold)?.with_detail("alpha", alpha))
            }
        }
    }
}

/// Result of a calibration run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub threshold: f64,
    pub quantile: f64,
    pub n_reps: usize,
    pub seed: u64,
    /// Null statistics in repetition order.
    pub statistics: Vec<f64>,
}

/// Fewest repetitions for which the empirical `quantile` is not the sample
/// maximum by default (e.g. 100 for 0.99).
pub fn min_reps(quantile: f64) -> usize {
    if quantile >= 1.0 {
        1
    } else {
        (1.0 / (1.0 - quantile) - 1e-9).ceil() as usize
    }
}

/// Empirical quantile: the `ceil(q n)`-th smallest value (`q = 1` gives the
/// maximum).
pub fn empirical_quantile(values: &[f64], quantile: f64) -> Result<f64> {
    if values.is_empty() {
        return domain("empirical quantile of an empty sample");
    }
    if !(quantile > 0.0 && quantile <= 1.0) {
        return domain(format!("quantile must lie in (0, 1], got {quantile}"));
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let rank = ((quantile * v.len() as f64) - 1e-9).ceil().max(1.0) as usize;
    Ok(v[rank.min(v.len()) - 1])
}

/// Runs `kind` under the null configuration `null_spec` for `n_reps`
/// seeded repetitions and returns the empirical `quantile` of the
/// statistic. Repetition `r` uses `RngState::from_seed(seed).fork(r)`.
pub fn calibrate(
    null_spec: &ProcessSpec,
    kind: &TestKind,
    design: &EcfDesign,
    n_reps: usize,
    quantile: f64,
    seed: u64,
) -> Result<Calibration> {
    if !(quantile > 0.0 && quantile <= 1.0) {
        return domain(format!("quantile must lie in (0, 1], got {quantile}"));
    }
    if n_reps < min_reps(quantile) {
        return domain(format!("quantile {quantile} needs at least {} repetitions, got {n_reps}", min_reps(quantile)));
    }
    let base = RngState::from_seed(seed);
    let statistics: Vec<f64> = (0..n_reps)
        .into_par_iter()
        .map(|r| kind.run(null_spec, design, &base.fork(r as u64), f64::INFINITY).map(|rep| rep.statistic))
        .collect::<Result<_>>()?;
    let threshold = empirical_quantile(&statistics, quantile)?;
    Ok(Calibration { threshold, quantile, n_reps, seed, statistics })
}
