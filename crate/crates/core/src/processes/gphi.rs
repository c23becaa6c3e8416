//! Discretized stochastic integrals `G_t = ∫ φ(u/t) dB_H(u)` against a
//! fractional Brownian motion.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::grid::TimeGrid;
use crate::kernels::{cov_matrix, Kernel};
use crate::linalg::Cholesky;
use crate::processes::ensemble::PathEnsemble;
use crate::processes::spec::ProcessSpec;
use crate::randkit::RngState;

/// Right-open step function: `values[k]` on `[breaks[k], breaks[k+1])`,
/// zero elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return domain("step function has empty support");
        }
        if breaks.len() != values.len() + 1 {
            return domain("step function needs one more break than values");
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks[0] < 0.0 {
            return domain("step function breaks must be nonnegative and strictly increasing");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("step function values must be finite");
        }
        Ok(Self { breaks, values })
    }

    /// `1` on `[0, 1)`.
    pub fn unit_indicator() -> Self {
        Self { breaks: vec![0.0, 1.0], values: vec![1.0] }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < self.breaks[0] || x >= *self.breaks.last().unwrap() {
            return 0.0;
        }
        let k = self.breaks.partition_point(|&b| b <= x) - 1;
        self.values[k]
    }
}

/// Paths of `G_t = Σ_m φ(u_m/t) (B_H(u_{m+1}) - B_H(u_m))` over the
/// integration mesh `u_0 < ... < u_M`, with `G_0 = 0`.
///
/// One fBm path per sample is drawn exactly on the mesh; the bias is the
/// left-point discretization error, O(mesh). The returned ensemble carries
/// `GaussianKernel(Fbm(H))` as its spec (same IDT exponent `2H`) and
/// `construction = gphi` in its metadata.
pub fn gphi_paths(
    hurst: f64,
    phi: &StepFunction,
    mesh: &TimeGrid,
    grid: &TimeGrid,
    n_paths: usize,
    rng: &RngState,
) -> Result<PathEnsemble> {
    let kernel = Kernel::fbm(hurst)?;
    if n_paths == 0 {
        return domain("n_paths must be at least 1");
    }
    if mesh.len() < 2 {
        return domain("integration mesh needs at least two points");
    }
    let u = mesh.points();
    // B_H(0) = 0, so only positive mesh points enter the factorization.
    let offset = usize::from(u[0] == 0.0);
    let positive = TimeGrid::new(u[offset..].to_vec())?;
    let factor = Cholesky::factor_with_jitter(&cov_matrix(&kernel, &positive)?, 3)?;
    let weights: Vec<Vec<f64>> = grid
        .points()
        .iter()
        .map(|&t| {
            if t == 0.0 {
                vec![0.0; u.len() - 1]
            } else {
                u[..u.len() - 1].iter().map(|&um| phi.eval(um / t)).collect()
            }
        })
        .collect();
    let seed = rng.ensemble_seed();
    let rows: Vec<Vec<f64>> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut r = RngState::new(seed, i as u64);
            let z: Vec<f64> = (0..factor.dim()).map(|_| r.sample_normal()).collect();
            let mut b = vec![0.0; u.len()];
            factor.mul_vec(&z, &mut b[offset..]);
            let db: Vec<f64> = b.windows(2).map(|w| w[1] - w[0]).collect();
            weights.iter().map(|ws| ws.iter().zip(&db).map(|(w, d)| w * d).sum()).collect()
        })
        .collect();
    let mut meta = std::collections::BTreeMap::new();
    meta.insert("construction".into(), "gphi".into());
    meta.insert("mesh_points".into(), u.len().to_string());
    meta.insert("cholesky_jitter".into(), format!("{:e}", factor.jitter));
    PathEnsemble::from_parts(
        grid.clone(),
        n_paths,
        rows.concat(),
        ProcessSpec::GaussianKernel { kernel },
        seed,
        meta,
    )
}
