//! Distribution-level checks of the α-IDT identities.
//!
//! Distance tests compare empirical characteristic functions of
//! independently generated ensembles and report
//! `max_θ |φ̂_left(θ) - φ̂_right(θ)|` over a [`ThetaGrid`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{contract, domain, Result};
use crate::grid::TimeGrid;
use crate::processes::{additive_paths, generate, LevyFamily, PathEnsemble, ProcessSpec};
use crate::randkit::RngState;
use crate::report::TestReport;
use crate::statlab::ecf::{ecf, ecf_probes, EcfEvaluation, ThetaGrid, MAX_MARGINAL_DIM};
use crate::statlab::ks::ks_two_sample;
use crate::transforms::{scale_paths, sum_independent};

/// Grid, θ design and ensemble size shared by the distance tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcfDesign {
    pub grid: TimeGrid,
    pub probes: ThetaGrid,
    pub n_paths: usize,
}

impl EcfDesign {
    /// Standard θ grid over every grid time.
    pub fn standard(grid: TimeGrid, n_paths: usize) -> Result<Self> {
        let idx: Vec<usize> = (0..grid.len()).collect();
        Self::new(grid, ThetaGrid::standard(&idx)?, n_paths)
    }

    pub fn new(grid: TimeGrid, probes: ThetaGrid, n_paths: usize) -> Result<Self> {
        if n_paths == 0 {
            return domain("n_paths must be at least 1");
        }
        if probes.max_time_index() >= grid.len() {
            return domain("theta grid references a time index outside the grid");
        }
        Ok(Self { grid, probes, n_paths })
    }
}

/// How the n-fold sum in the IDT identity is estimated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum IdtMode {
    /// `(φ̂_B)^n` from one ensemble.
    #[default]
    Power,
    /// ECF of an explicit sum of `n` independent ensembles.
    Sum,
}

/// Largest pointwise distance and where it occurred.
struct Distance {
    value: f64,
    probe: usize,
    theta: Vec<f64>,
}

fn max_distance(
    left: &[EcfEvaluation],
    right: &[EcfEvaluation],
    combine: impl Fn(usize, usize, Complex64) -> Complex64,
) -> Distance {
    let mut best = Distance { value: 0.0, probe: 0, theta: Vec::new() };
    for (p, (l, r)) in left.iter().zip(right).enumerate() {
        for (k, (&a, &b)) in l.values.iter().zip(&r.values).enumerate() {
            let d = (a - combine(p, k, b)).norm();
            if d.is_nan() || d > best.value || best.theta.is_empty() {
                best = Distance { value: d, probe: p, theta: l.theta_points[k].clone() };
                if d.is_nan() {
                    return best;
                }
            }
        }
    }
    best
}

fn distance_report(name: &str, dist: Distance, threshold: f64, design: &EcfDesign, rng: &RngState, spec: &ProcessSpec) -> TestReport {
    TestReport::distance(name, dist.value, threshold, design.n_paths, rng.ensemble_seed())
        .with_detail("theta_grid", &design.probes.id)
        .with_detail("argmax_probe_times", &design.probes.probes[dist.probe].times)
        .with_detail("argmax_theta", &dist.theta)
        .with_detail("grid", design.grid.points())
        .with_detail("spec", spec)
}

/// Checks `(X_{n^{1/α} t}) = (X^{(1)}_t + ... + X^{(n)}_t)` in law.
pub fn idt_test(spec: &ProcessSpec, alpha: f64, n: u32, design: &EcfDesign, rng: &RngState, threshold: f64) -> Result<TestReport> {
    idt_test_with_mode(spec, alpha, n, design, rng, threshold, IdtMode::Power)
}

pub fn idt_test_with_mode(
    spec: &ProcessSpec,
    alpha: f64,
    n: u32,
    design: &EcfDesign,
    rng: &RngState,
    threshold: f64,
    mode: IdtMode,
) -> Result<TestReport> {
    if n < 2 {
        return domain(format!("idt_test needs n >= 2, got {n}"));
    }
    if !(alpha > 0.0) {
        return domain(format!("idt_test needs alpha > 0, got {alpha}"));
    }
    let dilation = (n as f64).powf(1.0 / alpha);
    let a = generate(spec, &design.grid.scaled(dilation)?, design.n_paths, &rng.fork(1))?;
    let phi_a = ecf_probes(&a, &design.probes)?;
    let dist = match mode {
        IdtMode::Power => {
            let b = generate(spec, &design.grid, design.n_paths, &rng.fork(2))?;
            let phi_b = ecf_probes(&b, &design.probes)?;
            max_distance(&phi_a, &phi_b, |_, _, z| z.powu(n))
        }
        IdtMode::Sum => {
            let s = sum_independent(spec, n as usize, &design.grid, design.n_paths, &rng.fork(2))?;
            let phi_s = ecf_probes(&s, &design.probes)?;
            max_distance(&phi_a, &phi_s, |_, _, z| z)
        }
    };
    Ok(distance_report("idt_test", dist, threshold, design, rng, spec)
        .with_detail("alpha", alpha)
        .with_detail("n", n)
        .with_detail("mode", mode))
}

/// Checks `(X_{a t}) = (a^h X_t)` in law.
pub fn selfsimilarity_test(spec: &ProcessSpec, h: f64, a: f64, design: &EcfDesign, rng: &RngState, threshold: f64) -> Result<TestReport> {
    if !(a > 0.0) || a == 1.0 {
        return domain(format!("selfsimilarity_test needs a > 0 and a != 1, got {a}"));
    }
    let dilated = generate(spec, &design.grid.scaled(a)?, design.n_paths, &rng.fork(1))?;
    let base = scale_paths(&generate(spec, &design.grid, design.n_paths, &rng.fork(2))?, a.powf(h))?;
    let dist = max_distance(&ecf_probes(&dilated, &design.probes)?, &ecf_probes(&base, &design.probes)?, |_, _, z| z);
    Ok(distance_report("selfsimilarity_test", dist, threshold, design, rng, spec)
        .with_detail("h", h)
        .with_detail("a", a))
}

/// Checks `(Σ_{j≤n} X^{(j)}_t) = (n^{1/β} X_t)` in law.
pub fn stability_test(spec: &ProcessSpec, beta: f64, n: u32, design: &EcfDesign, rng: &RngState, threshold: f64) -> Result<TestReport> {
    if n < 2 {
        return domain(format!("stability_test needs n >= 2, got {n}"));
    }
    if !(beta > 0.0) {
        return domain(format!("stability_test needs beta > 0, got {beta}"));
    }
    let sum = sum_independent(spec, n as usize, &design.grid, design.n_paths, &rng.fork(1))?;
    let scaled = scale_paths(
        &generate(spec, &design.grid, design.n_paths, &rng.fork(2))?,
        (n as f64).powf(1.0 / beta),
    )?;
    let dist = max_distance(&ecf_probes(&sum, &design.probes)?, &ecf_probes(&scaled, &design.probes)?, |_, _, z| z);
    Ok(distance_report("stability_test", dist, threshold, design, rng, spec)
        .with_detail("beta", beta)
        .with_detail("n", n))
}

/// Checks `φ_t = φ_{b^{1/α} t} · φ_{(1-b)^{1/α} t}` on three independent
/// ensembles.
pub fn temporal_sd_test(spec: &ProcessSpec, alpha: f64, b: f64, design: &EcfDesign, rng: &RngState, threshold: f64) -> Result<TestReport> {
    if !(b > 0.0 && b < 1.0) {
        return domain(format!("temporal_sd_test needs b in (0, 1), got {b}"));
    }
    if !(alpha > 0.0) {
        return domain(format!("temporal_sd_test needs alpha > 0, got {alpha}"));
    }
    let whole = generate(spec, &design.grid, design.n_paths, &rng.fork(1))?;
    let first = generate(spec, &design.grid.scaled(b.powf(1.0 / alpha))?, design.n_paths, &rng.fork(2))?;
    let second = generate(spec, &design.grid.scaled((1.0 - b).powf(1.0 / alpha))?, design.n_paths, &rng.fork(3))?;
    let phi_w = ecf_probes(&whole, &design.probes)?;
    let phi_1 = ecf_probes(&first, &design.probes)?;
    let phi_2 = ecf_probes(&second, &design.probes)?;
    let dist = max_distance(&phi_w, &phi_1, |p, k, z| z * phi_2[p].values[k]);
    Ok(distance_report("temporal_sd_test", dist, threshold, design, rng, spec)
        .with_detail("alpha", alpha)
        .with_detail("b", b)
        .with_detail("residual_scale", b.powf(1.0 / alpha)))
}

/// Compares the joint ECF of `window` consecutive columns at offset 0 with
/// the one at offset `shift`, on a uniformly spaced log-time ensemble.
///
/// Empty `thetas` selects [`ThetaGrid::window_thetas`].
pub fn stationarity_test(e: &PathEnsemble, window: usize, shift: usize, thetas: &[Vec<f64>], threshold: f64) -> Result<TestReport> {
    if window == 0 || window > MAX_MARGINAL_DIM {
        return domain(format!("window must be 1..={MAX_MARGINAL_DIM}, got {window}"));
    }
    if window + shift > e.n_times() {
        return domain(format!("window {window} + shift {shift} exceeds {} grid points", e.n_times()));
    }
    let ys = e.grid().points();
    if ys.len() > 2 {
        let step = ys[1] - ys[0];
        if ys.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > 1e-9 * step.abs().max(1.0)) {
            return contract("stationarity_test needs a uniformly spaced grid");
        }
    }
    let default;
    let thetas = if thetas.is_empty() {
        default = ThetaGrid::window_thetas(window);
        &default[..]
    } else {
        thetas
    };
    let at0: Vec<usize> = (0..window).collect();
    let at_shift: Vec<usize> = (shift..shift + window).collect();
    let left = ecf(e, &at0, thetas)?;
    let right = ecf(e, &at_shift, thetas)?;
    let (mut stat, mut arg) = (0.0f64, 0usize);
    for (k, (a, b)) in left.values.iter().zip(&right.values).enumerate() {
        let d = (a - b).norm();
        if d > stat || d.is_nan() {
            stat = d;
            arg = k;
        }
    }
    Ok(TestReport::distance("stationarity_test", stat, threshold, e.n_paths(), e.seed())
        .with_detail("window", window)
        .with_detail("shift", shift)
        .with_detail("argmax_theta", &thetas[arg])
        .with_detail("grid", ys))
}

/// Two-sample KS between the marginals of `spec` and of `L_{t^α}` at every
/// `t`; passes iff all p-values are at least `level / |t_list|`.
pub fn association_test(
    spec: &ProcessSpec,
    family: &LevyFamily,
    alpha: f64,
    t_list: &[f64],
    n_paths: usize,
    rng: &RngState,
    level: f64,
) -> Result<TestReport> {
    if !(level > 0.0 && level < 1.0) {
        return domain(format!("level must lie in (0, 1), got {level}"));
    }
    let grid = TimeGrid::new(t_list.to_vec())?;
    let x = generate(spec, &grid, n_paths, &rng.fork(1))?;
    let l = additive_paths(family, alpha, &grid, n_paths, &rng.fork(2))?;
    let mut p_values = Vec::with_capacity(t_list.len());
    let mut stats = Vec::with_capacity(t_list.len());
    for j in 0..grid.len() {
        let (d, p) = ks_two_sample(&x.column(j), &l.column(j))?;
        stats.push(d);
        p_values.push(p);
    }
    let min_p = p_values.iter().copied().fold(f64::INFINITY, f64::min);
    let corrected = level / t_list.len() as f64;
    Ok(TestReport::p_value("association_test", min_p, corrected, n_paths, rng.ensemble_seed())
        .with_detail("level", level)
        .with_detail("times", t_list)
        .with_detail("ks_statistics", &stats)
        .with_detail("p_values", &p_values)
        .with_detail("alpha", alpha)
        .with_detail("family", family)
        .with_detail("spec", spec))
}
