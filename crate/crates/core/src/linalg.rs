//! Small dense symmetric matrices: Cholesky factorization and Jacobi
//! eigenvalues. Sizes here are tens of rows, so O(n^3) is fine.

use serde::{Deserialize, Serialize};

use crate::error::{contract, IdtError, Result};
use crate::scalar::Real;

/// Dense square matrix stored row-major. Used for covariance matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix<T = f64> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    /// Builds a matrix from rows. The rows must form a square array; symmetry
    /// is not checked here.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return contract("matrix rows must form a square array");
        }
        Ok(Self { n, data: rows.concat() })
    }

    /// Fills the upper triangle with `f(i, j)` and mirrors it.
    pub fn from_fn_symmetric(n: usize, mut f: impl FnMut(usize, usize) -> Result<T>) -> Result<Self> {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j)?;
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }
}

/// Lower-triangular Cholesky factor, row-major.
#[derive(Clone, Debug)]
pub struct Cholesky<T = f64> {
    n: usize,
    lower: Vec<T>,
    /// Diagonal jitter that was added before the factorization succeeded.
    pub jitter: T,
}

impl<T: Real> Cholesky<T> {
    /// Plain Cholesky; `None` if a pivot is not strictly positive.
    pub fn factor(m: &SymMatrix<T>) -> Option<Self> {
        Self::factor_shifted(m, T::zero())
    }

    fn factor_shifted(m: &SymMatrix<T>, shift: T) -> Option<Self> {
        let n = m.dim();
        let mut l = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = m.get(i, j);
                if i == j {
                    s = s + shift;
                }
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !(s > T::zero()) || !s.is_finite() {
                        return None;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Some(Self { n, lower: l, jitter: shift })
    }

    /// Factorization with escalating diagonal jitter: no jitter first, then
    /// `1e-12 * trace / n`, growing ×10 for up to `attempts` retries.
    pub fn factor_with_jitter(m: &SymMatrix<T>, attempts: usize) -> Result<Self> {
        if let Some(c) = Self::factor(m) {
            return Ok(c);
        }
        let n = m.dim().max(1);
        let base = T::lit(1e-12) * m.trace().abs() / T::from_usize(n).unwrap();
        let base = if base > T::zero() { base } else { T::lit(1e-12) };
        let mut jitter = base;
        for _ in 0..attempts {
            if let Some(c) = Self::factor_shifted(m, jitter) {
                return Ok(c);
            }
            jitter = jitter * T::lit(10.0);
        }
        Err(IdtError::Numerical(format!(
            "cholesky failed on {}x{} matrix after {attempts} jitter attempts (last jitter {})",
            m.dim(),
            m.dim(),
            jitter / T::lit(10.0)
        )))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.lower[i * self.n + j]
    }

    /// Writes `L z` into `out`.
    pub fn mul_vec(&self, z: &[T], out: &mut [T]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.lower[i * n..i * n + i + 1];
            out[i] = row.iter().zip(z).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        }
    }
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
///
/// Fails with a contract error if the matrix is not symmetric up to a few
/// ulps of its largest entry.
pub fn min_eigenvalue<T: Real>(m: &SymMatrix<T>) -> Result<T> {
    let evs = symmetric_eigenvalues(m)?;
    Ok(evs.into_iter().fold(T::infinity(), T::min))
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues<T: Real>(m: &SymMatrix<T>) -> Result<Vec<T>> {
    let n = m.dim();
    let scale = m.max_abs();
    let tol = T::epsilon() * T::lit(64.0) * scale.max(T::one());
    if !m.is_symmetric(tol) {
        return contract("eigenvalue routine requires a symmetric matrix");
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = m.clone();
    let two = T::lit(2.0);
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |acc, (i, j)| acc + a.get(i, j) * a.get(i, j));
        if off <= T::epsilon() * T::epsilon() * scale * scale * T::from_usize(n * n).unwrap() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == T::zero() {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    let mut evs: Vec<T> = (0..n).map(|i| a.get(i, i)).collect();
    evs.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(evs)
}
