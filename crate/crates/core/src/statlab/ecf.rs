//! Empirical characteristic functions of finite-dimensional marginals.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::processes::PathEnsemble;

/// Largest marginal dimension probed.
pub const MAX_MARGINAL_DIM: usize = 3;

/// Default θ components: `±0.25, ±0.5, ±1, ±2`.
pub const STANDARD_COMPONENTS: [f64; 4] = [0.25, 0.5, 1.0, 2.0];

const CHUNK: usize = 2048;

/// `(1/N) Σ_paths exp(i Σ_k θ_k X_{t_k})` at each θ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcfEvaluation {
    pub times: Vec<usize>,
    pub theta_points: Vec<Vec<f64>>,
    pub values: Vec<Complex64>,
    pub n_samples: usize,
}

/// A set of θ vectors attached to one marginal (a subset of time indices).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalProbe {
    pub times: Vec<usize>,
    pub thetas: Vec<Vec<f64>>,
}

/// The θ design of a distance test: a list of marginal probes plus an id
/// used to key calibrated thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    pub id: String,
    pub probes: Vec<MarginalProbe>,
}

impl ThetaGrid {
    pub fn new(id: impl Into<String>, probes: Vec<MarginalProbe>) -> Result<Self> {
        if probes.is_empty() {
            return domain("theta grid needs at least one probe");
        }
        for p in &probes {
            if p.times.is_empty() || p.times.len() > MAX_MARGINAL_DIM {
                return domain(format!("marginal dimension must be 1..={MAX_MARGINAL_DIM}, got {}", p.times.len()));
            }
            if p.thetas.is_empty() {
                return domain("probe has an empty theta list");
            }
            if p.thetas.iter().any(|th| th.len() != p.times.len()) {
                return domain("theta vector length differs from marginal dimension");
            }
        }
        Ok(Self { id: id.into(), probes })
    }

    /// Every single time and every pair of times from `times`, with θ
    /// components from [`STANDARD_COMPONENTS`]. Pairs of θ related by
    /// `θ -> -θ` are listed once since ECF moduli agree on them.
    pub fn standard(times: &[usize]) -> Result<Self> {
        let signed: Vec<f64> = STANDARD_COMPONENTS.iter().flat_map(|&c| [c, -c]).collect();
        let mut probes: Vec<MarginalProbe> = times
            .iter()
            .map(|&t| MarginalProbe { times: vec![t], thetas: STANDARD_COMPONENTS.iter().map(|&c| vec![c]).collect() })
            .collect();
        for (i, &s) in times.iter().enumerate() {
            for &t in &times[i + 1..] {
                let thetas = STANDARD_COMPONENTS
                    .iter()
                    .flat_map(|&a| signed.iter().map(move |&b| vec![a, b]))
                    .collect();
                probes.push(MarginalProbe { times: vec![s, t], thetas });
            }
        }
        Self::new("std-m12-v1", probes)
    }

    /// θ vectors of length `dim` for window-type tests, first component
    /// positive.
    pub fn window_thetas(dim: usize) -> Vec<Vec<f64>> {
        let signed: Vec<f64> = STANDARD_COMPONENTS.iter().flat_map(|&c| [c, -c]).collect();
        let mut out: Vec<Vec<f64>> = STANDARD_COMPONENTS.iter().map(|&c| vec![c]).collect();
        for _ in 1..dim {
            out = out
                .into_iter()
                .flat_map(|v| {
                    signed.iter().map(move |&c| {
                        let mut w = v.clone();
                        w.push(c);
                        w
                    })
                })
                .collect();
        }
        out
    }

    pub fn n_points(&self) -> usize {
        self.probes.iter().map(|p| p.thetas.len()).sum()
    }

    pub fn max_time_index(&self) -> usize {
        self.probes.iter().flat_map(|p| p.times.iter().copied()).max().unwrap_or(0)
    }
}

/// Empirical characteristic function of the marginal at `times` (column
/// indices of `e`).
///
/// Partial sums run over fixed chunks of paths and are combined in chunk
/// order, so results are independent of the thread count. `ecf(-θ)` is the
/// exact conjugate of `ecf(θ)` and `ecf(0) = 1` exactly.
pub fn ecf(e: &PathEnsemble, times: &[usize], thetas: &[Vec<f64>]) -> Result<EcfEvaluation> {
    if thetas.is_empty() {
        return domain("ecf needs at least one theta point");
    }
    if times.is_empty() || times.len() > MAX_MARGINAL_DIM {
        return domain(format!("marginal dimension must be 1..={MAX_MARGINAL_DIM}"));
    }
    if let Some(&bad) = times.iter().find(|&&t| t >= e.n_times()) {
        return domain(format!("time index {bad} out of range for {} grid points", e.n_times()));
    }
    if thetas.iter().any(|th| th.len() != times.len()) {
        return domain("theta vector length differs from marginal dimension");
    }
    let m = times.len();
    // Distinct |θ_k| per component; each θ refers to (slot, conjugate?) pairs.
    let mut levels: Vec<Vec<f64>> = vec![Vec::new(); m];
    let mut plan: Vec<Vec<Option<(usize, bool)>>> = Vec::with_capacity(thetas.len());
    for th in thetas {
        let mut entry = Vec::with_capacity(m);
        for (k, &x) in th.iter().enumerate() {
            if x == 0.0 {
                entry.push(None);
                continue;
            }
            let a = x.abs();
            let slot = match levels[k].iter().position(|&v| v == a) {
                Some(p) => p,
                None => {
                    levels[k].push(a);
                    levels[k].len() - 1
                }
            };
            entry.push(Some((slot, x < 0.0)));
        }
        plan.push(entry);
    }
    let offsets: Vec<usize> = levels
        .iter()
        .scan(0, |acc, l| {
            let o = *acc;
            *acc += l.len();
            Some(o)
        })
        .collect();
    let n_phasors: usize = levels.iter().map(Vec::len).sum();
    let n_paths = e.n_paths();
    let n_chunks = n_paths.div_ceil(CHUNK);
    let partials: Vec<Vec<Complex64>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut sums = vec![Complex64::new(0.0, 0.0); thetas.len()];
            let mut phasors = vec![Complex64::new(0.0, 0.0); n_phasors];
            for p in c * CHUNK..((c + 1) * CHUNK).min(n_paths) {
                let row = e.row(p);
                for (k, lv) in levels.iter().enumerate() {
                    let x = row[times[k]];
                    for (s, &a) in lv.iter().enumerate() {
                        let (sin, cos) = (a * x).sin_cos();
                        phasors[offsets[k] + s] = Complex64::new(cos, sin);
                    }
                }
                for (sum, entry) in sums.iter_mut().zip(&plan) {
                    let mut z = Complex64::new(1.0, 0.0);
                    for (k, slot) in entry.iter().enumerate() {
                        if let Some((s, neg)) = *slot {
                            let ph = phasors[offsets[k] + s];
                            z *= if neg { ph.conj() } else { ph };
                        }
                    }
                    *sum += z;
                }
            }
            sums
        })
        .collect();
    let mut total = vec![Complex64::new(0.0, 0.0); thetas.len()];
    for part in &partials {
        for (t, v) in total.iter_mut().zip(part) {
            *t += v;
        }
    }
    let inv = n_paths as f64;
    Ok(EcfEvaluation {
        times: times.to_vec(),
        theta_points: thetas.to_vec(),
        values: total.into_iter().map(|z| z / inv).collect(),
        n_samples: n_paths,
    })
}

/// ECF of every probe in `grid`.
pub fn ecf_probes(e: &PathEnsemble, grid: &ThetaGrid) -> Result<Vec<EcfEvaluation>> {
    grid.probes.iter().map(|p| ecf(e, &p.times, &p.thetas)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::{generate, ProcessSpec, TimeGrid};
    use crate::randkit::RngState;

    fn cauchy_line(n: usize) -> PathEnsemble {
        let g = TimeGrid::new(vec![0.5, 1.0, 2.0]).unwrap();
        generate(&ProcessSpec::StableLine { alpha: 1.0 }, &g, n, &RngState::from_seed(21)).unwrap()
    }

    #[test]
    fn zero_theta_is_one_and_conjugate_symmetry() {
        let e = cauchy_line(5000);
        let th = vec![vec![0.0, 0.0], vec![0.5, -1.0], vec![-0.5, 1.0]];
        let v = ecf(&e, &[0, 2], &th).unwrap();
        assert_eq!(v.values[0], Complex64::new(1.0, 0.0));
        assert_eq!(v.values[2], v.values[1].conj());
        assert!(v.values.iter().all(|z| z.norm() <= 1.0 + 1e-12));
    }

    #[test]
    fn cauchy_cf_matches() {
        let n = 40_000;
        let e = cauchy_line(n);
        let th: Vec<Vec<f64>> = STANDARD_COMPONENTS.iter().map(|&c| vec![c]).collect();
        let v = ecf(&e, &[1], &th).unwrap();
        for (z, t) in v.values.iter().zip(&th) {
            let want = (-t[0].abs()).exp();
            assert!((z - want).norm() <= 3.0 / (n as f64).sqrt(), "{z} vs {want}");
        }
    }

    #[test]
    fn errors() {
        let e = cauchy_line(10);
        assert!(ecf(&e, &[0], &[]).is_err());
        assert!(ecf(&e, &[5], &[vec![1.0]]).is_err());
        assert!(ecf(&e, &[0, 1, 2, 0], &[vec![1.0; 4]]).is_err());
    }

    #[test]
    fn standard_grid_shape() {
        let g = ThetaGrid::standard(&[0, 1, 2]).unwrap();
        assert_eq!(g.probes.len(), 6);
        assert_eq!(g.n_points(), 3 * 4 + 3 * 32);
        assert_eq!(ThetaGrid::window_thetas(2).len(), 32);
    }

    #[test]
    fn matches_direct_summation() {
        let e = cauchy_line(3000);
        let th = vec![vec![0.3, -1.7, 0.25]];
        let v = ecf(&e, &[0, 1, 2], &th).unwrap();
        let direct: Complex64 = e
            .rows()
            .map(|r| Complex64::new(0.0, 0.3 * r[0] - 1.7 * r[1] + 0.25 * r[2]).exp())
            .sum::<Complex64>()
            / 3000.0;
        assert!((v.values[0] - direct).norm() < 1e-12);
    }
}
