//! Path generation. A [`Plan`] is compiled once per (spec, grid) and then
//! sampled once per path, each path on its own substream.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{contract, domain, IdtError, Result};
use crate::grid::TimeGrid;
use crate::kernels::{cov_matrix, Kernel};
use crate::linalg::{Cholesky, SymMatrix};
use crate::processes::ensemble::PathEnsemble;
use crate::processes::spec::{LevyFamily, ProcessSpec};
use crate::randkit::{RngState, StableParams};

const JITTER_ATTEMPTS: usize = 3;

#[derive(Clone, Debug)]
enum Plan {
    Line { params: StableParams, coeffs: Vec<f64> },
    Gaussian { factor: Cholesky<f64>, active: Vec<usize>, n_times: usize },
    Additive { family: LevyFamily, steps: Vec<f64> },
    Subordinated { family: LevyFamily, chrono: Box<Plan> },
    Combine { base: Box<Plan>, weights: Vec<Vec<(usize, f64)>> },
}

/// Sorted, deduplicated merge of `{u_i t_j}` plus the lookup table from
/// each output time to `(merged index, weight)` pairs.
fn merged_grid(atoms: &[(f64, f64)], grid: &TimeGrid) -> Result<(TimeGrid, Vec<Vec<(usize, f64)>>)> {
    let mut pts: Vec<f64> = atoms
        .iter()
        .flat_map(|&(u, _)| grid.points().iter().map(move |&t| u * t))
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    pts.dedup();
    let merged = TimeGrid::new(pts)?;
    let lookup = |x: f64| {
        merged
            .points()
            .binary_search_by(|p| p.partial_cmp(&x).expect("finite grid"))
            .expect("merged grid contains every product")
    };
    let weights = grid
        .points()
        .iter()
        .map(|&t| atoms.iter().map(|&(u, w)| (lookup(u * t), w)).collect())
        .collect();
    Ok((merged, weights))
}

impl Plan {
    fn prepare(spec: &ProcessSpec, grid: &TimeGrid) -> Result<(Plan, BTreeMap<String, String>)> {
        let mut meta = BTreeMap::new();
        let plan = Self::build(spec, grid, &mut meta)?;
        Ok((plan, meta))
    }

    fn build(spec: &ProcessSpec, grid: &TimeGrid, meta: &mut BTreeMap<String, String>) -> Result<Plan> {
        let pts = grid.points();
        Ok(match spec {
            ProcessSpec::StableLine { alpha } => Plan::Line {
                params: StableParams::symmetric(*alpha)?,
                coeffs: pts.to_vec(),
            },
            ProcessSpec::PowerLine { alpha } => Plan::Line {
                params: StableParams::symmetric(1.0)?,
                coeffs: pts.iter().map(|t| t.powf(*alpha)).collect(),
            },
            ProcessSpec::GaussianKernel { kernel } => {
                let (factor, active) = gaussian_factor(kernel, grid)?;
                meta.insert("cholesky_jitter".into(), format!("{:e}", factor.jitter));
                Plan::Gaussian { factor, active, n_times: pts.len() }
            }
            ProcessSpec::AdditiveTimeChange { family, alpha } => Plan::Additive {
                family: family.clone(),
                steps: deformed_steps(pts, *alpha),
            },
            ProcessSpec::Subordinated { family, chrono } => Plan::Subordinated {
                family: family.clone(),
                chrono: Box::new(Self::build(chrono, grid, meta)?),
            },
            ProcessSpec::Mixture { base, atoms } => {
                let (merged, weights) = merged_grid(atoms, grid)?;
                Plan::Combine { base: Box::new(Self::build(base, &merged, meta)?), weights }
            }
            ProcessSpec::PhiFunctional { subordinator, atoms, alpha } => {
                let (merged, weights) = merged_grid(atoms, grid)?;
                let base = Plan::Additive {
                    family: subordinator.clone(),
                    steps: deformed_steps(merged.points(), *alpha),
                };
                Plan::Combine { base: Box::new(base), weights }
            }
        })
    }

    fn sample(&self, rng: &mut RngState, out: &mut Vec<f64>) -> Result<()> {
        out.clear();
        match self {
            Plan::Line { params, coeffs } => {
                let s = rng.sample_stable(*params);
                out.extend(coeffs.iter().map(|c| c * s));
            }
            Plan::Gaussian { factor, active, n_times } => {
                let z: Vec<f64> = (0..factor.dim()).map(|_| rng.sample_normal()).collect();
                let mut x = vec![0.0; factor.dim()];
                factor.mul_vec(&z, &mut x);
                out.resize(*n_times, 0.0);
                for (k, &j) in active.iter().enumerate() {
                    out[j] = x[k];
                }
            }
            Plan::Additive { family, steps } => {
                let mut level = 0.0;
                for &dt in steps {
                    level += increment(family, dt, rng)?;
                    out.push(level);
                }
            }
            Plan::Subordinated { family, chrono } => {
                let mut xi = Vec::new();
                chrono.sample(rng, &mut xi)?;
                let mut prev = 0.0;
                let mut level = 0.0;
                for (j, &s) in xi.iter().enumerate() {
                    if !(s >= prev) {
                        return contract(format!(
                            "chronometer decreases at time index {j} ({prev} -> {s})"
                        ));
                    }
                    level += increment(family, s - prev, rng)?;
                    prev = s;
                    out.push(level);
                }
            }
            Plan::Combine { base, weights } => {
                let mut inner = Vec::new();
                base.sample(rng, &mut inner)?;
                out.extend(weights.iter().map(|ws| ws.iter().map(|&(k, w)| w * inner[k]).sum::<f64>()));
            }
        }
        Ok(())
    }
}

/// `t_0^α, t_1^α - t_0^α, ...`
fn deformed_steps(pts: &[f64], alpha: f64) -> Vec<f64> {
    let mut prev = 0.0;
    pts.iter()
        .map(|t| {
            let h = t.powf(alpha);
            let d = (h - prev).max(0.0);
            prev = h;
            d
        })
        .collect()
}

fn gaussian_factor(kernel: &Kernel<f64>, grid: &TimeGrid) -> Result<(Cholesky<f64>, Vec<usize>)> {
    kernel.validate()?;
    if grid.contains_zero() && !kernel.allows_zero_time() {
        return domain("spectral Gaussian kernels need strictly positive times");
    }
    // The fBm value at t = 0 is identically 0; factor the positive times only.
    let active: Vec<usize> = (0..grid.len()).filter(|&j| grid.points()[j] > 0.0).collect();
    let factor = if active.is_empty() {
        Cholesky::factor(&SymMatrix::zeros(0)).expect("empty matrix factors")
    } else {
        let sub = TimeGrid::new(active.iter().map(|&j| grid.points()[j]).collect())?;
        Cholesky::factor_with_jitter(&cov_matrix(kernel, &sub)?, JITTER_ATTEMPTS)?
    };
    Ok((factor, active))
}

/// Increment of `family` over a time span `dt >= 0`. `dt = 0` gives exactly 0.
fn increment(family: &LevyFamily, dt: f64, rng: &mut RngState) -> Result<f64> {
    if !(dt >= 0.0) {
        return domain(format!("increment span must be nonnegative, got {dt}"));
    }
    if dt == 0.0 {
        return Ok(0.0);
    }
    Ok(match *family {
        LevyFamily::Brownian { volatility, drift } => drift * dt + volatility * dt.sqrt() * rng.sample_normal(),
        LevyFamily::StableMotion { index, skew } => {
            dt.powf(1.0 / index) * rng.sample_stable(StableParams::new(index, skew)?)
        }
        LevyFamily::GammaSubordinator { shape, rate } => rng.sample_gamma(shape * dt, rate)?,
        LevyFamily::CompoundPoisson { intensity, jump_mean, jump_sd } => {
            let k = rng.sample_poisson(intensity * dt)?;
            if k == 0 {
                0.0
            } else {
                let k = k as f64;
                jump_mean * k + jump_sd * k.sqrt() * rng.sample_normal()
            }
        }
        LevyFamily::Deterministic { rate } => rate * dt,
    })
}

/// Independent increments of `family` over the spans in `dt_list`.
pub fn levy_increments(family: &LevyFamily, dt_list: &[f64], rng: &mut RngState) -> Result<Vec<f64>> {
    family.validate()?;
    dt_list.iter().map(|&dt| increment(family, dt, rng)).collect()
}

/// Generates `n_paths` independent realizations of `spec` on `grid`.
///
/// Path `i` is drawn from substream `i` of `rng.ensemble_seed()`, so the
/// result does not depend on the number of worker threads.
pub fn generate(spec: &ProcessSpec, grid: &TimeGrid, n_paths: usize, rng: &RngState) -> Result<PathEnsemble> {
    spec.validate()?;
    if n_paths == 0 {
        return domain("n_paths must be at least 1");
    }
    let (plan, meta) = Plan::prepare(spec, grid)?;
    let seed = rng.ensemble_seed();
    let m = grid.len();
    let rows: Vec<Vec<f64>> = (0..n_paths)
        .into_par_iter()
        .map_init(Vec::new, |buf, i| {
            let mut r = RngState::new(seed, i as u64);
            plan.sample(&mut r, buf).map_err(|e| match e {
                IdtError::Contract(msg) => IdtError::Contract(format!("path {i}: {msg}")),
                other => other,
            })?;
            debug_assert_eq!(buf.len(), m);
            Ok(buf.clone())
        })
        .collect::<Result<_>>()?;
    PathEnsemble::from_parts(grid.clone(), n_paths, rows.concat(), spec.clone(), seed, meta)
}

/// Exact joint sampling of a centered Gaussian process with kernel `k`.
pub fn gaussian_paths(k: &Kernel<f64>, grid: &TimeGrid, n_paths: usize, rng: &RngState) -> Result<PathEnsemble> {
    generate(&ProcessSpec::GaussianKernel { kernel: k.clone() }, grid, n_paths, rng)
}

/// Paths of `L_{t^α}`.
pub fn additive_paths(f: &LevyFamily, alpha: f64, grid: &TimeGrid, n_paths: usize, rng: &RngState) -> Result<PathEnsemble> {
    generate(&ProcessSpec::AdditiveTimeChange { family: f.clone(), alpha }, grid, n_paths, rng)
}

/// Paths of `L_{ξ_t}`; the chronometer is checked for monotonicity per path.
pub fn subordinated_paths(
    f: &LevyFamily,
    chrono: &ProcessSpec,
    grid: &TimeGrid,
    n_paths: usize,
    rng: &RngState,
) -> Result<PathEnsemble> {
    generate(
        &ProcessSpec::Subordinated { family: f.clone(), chrono: Box::new(chrono.clone()) },
        grid,
        n_paths,
        rng,
    )
}

/// Paths of `Σ_j w_j X_{(u_j t)^α}` for a subordinator `X`.
pub fn phi_functional_paths(
    sub: &LevyFamily,
    atoms: &[(f64, f64)],
    alpha: f64,
    grid: &TimeGrid,
    n_paths: usize,
    rng: &RngState,
) -> Result<PathEnsemble> {
    generate(
        &ProcessSpec::PhiFunctional { subordinator: sub.clone(), atoms: atoms.to_vec(), alpha },
        grid,
        n_paths,
        rng,
    )
}
