use crate::error::{domain, Result};
use crate::linalg::SymMatrix;
use crate::processes::PathEnsemble;

/// Uncentered sample covariance `(1/N) Σ_paths X_{t_i} X_{t_j}`.
pub fn cov_estimate(e: &PathEnsemble) -> Result<SymMatrix<f64>> {
    if e.n_paths() < 2 {
        return domain("covariance estimate needs at least two paths");
    }
    let m = e.n_times();
    let n = e.n_paths() as f64;
    let mut acc = vec![0.0; m * m];
    for r in e.rows() {
        for i in 0..m {
            for j in i..m {
                acc[i * m + j] += r[i] * r[j];
            }
        }
    }
    SymMatrix::from_fn_symmetric(m, |i, j| Ok(acc[i * m + j] / n))
}
