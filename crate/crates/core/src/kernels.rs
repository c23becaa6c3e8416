//! Covariance kernels of Gaussian α-IDT processes.
//!
//! A centered Gaussian process is α-IDT exactly when its covariance obeys
//! `c(as, at) = a^α c(s, t)`. Two families are provided:
//!
//! * fractional Brownian motion, `½(t^{2H} + s^{2H} - |t - s|^{2H})`, which
//!   scales with exponent `2H`;
//! * spectral kernels `(st)^{α/2} Σ_j w_j cos(a_j ln(s/t))` built from a
//!   finite symmetric atomic measure.
//!
//! The Lamperti covariance `e^{-α(y+z)/2} c(e^y, e^z)` of a kernel with the
//! right exponent depends on `y - z` only.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::grid::TimeGrid;
use crate::linalg::{min_eigenvalue, SymMatrix};
use crate::report::TestReport;
use crate::scalar::Real;

/// Finite symmetric atomic measure on the real line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(T, T)>", into = "Vec<(T, T)>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct SpectralMeasure<T = f64> {
    atoms: Vec<(T, T)>,
}

impl<T: Real> SpectralMeasure<T> {
    /// Atoms are `(location, weight)`. Weights must be positive and every
    /// atom at `a != 0` needs a mirror atom at `-a` with the same weight.
    pub fn new(atoms: Vec<(T, T)>) -> Result<Self> {
        if atoms.is_empty() {
            return domain("spectral measure needs at least one atom");
        }
        for &(a, w) in &atoms {
            if !a.is_finite() || !(w > T::zero() && w.is_finite()) {
                return domain(format!("invalid spectral atom ({a}, {w}): weight must be positive and finite"));
            }
        }
        for &(a, w) in &atoms {
            if a != T::zero() {
                let mirrored = atoms.iter().any(|&(b, v)| b == -a && v == w);
                if !mirrored {
                    return domain(format!("spectral measure is not symmetric: atom ({a}, {w}) has no mirror"));
                }
            }
        }
        Ok(Self { atoms })
    }

    /// Builds a symmetric measure from half-line atoms `(a_j, w_j)`, adding
    /// `(-a_j, w_j)` for each nonzero location.
    pub fn symmetrized(half: &[(T, T)]) -> Result<Self> {
        let mut atoms = Vec::with_capacity(2 * half.len());
        for &(a, w) in half {
            atoms.push((a, w));
            if a != T::zero() {
                atoms.push((-a, w));
            }
        }
        Self::new(atoms)
    }

    pub fn atoms(&self) -> &[(T, T)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> T {
        self.atoms.iter().fold(T::zero(), |acc, &(_, w)| acc + w)
    }

    /// Cosine transform `Σ w_j cos(a_j x)`.
    pub fn cosine_transform(&self, x: T) -> T {
        self.atoms.iter().fold(T::zero(), |acc, &(a, w)| acc + w * (a * x).cos())
    }
}

impl<T: Real> TryFrom<Vec<(T, T)>> for SpectralMeasure<T> {
    type Error = crate::IdtError;
    fn try_from(atoms: Vec<(T, T)>) -> Result<Self> {
        Self::new(atoms)
    }
}

impl<T: Real> From<SpectralMeasure<T>> for Vec<(T, T)> {
    fn from(m: SpectralMeasure<T>) -> Self {
        m.atoms
    }
}

/// Covariance kernel of a centered Gaussian α-IDT process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub enum Kernel<T = f64> {
    /// Normalized fractional Brownian motion with Hurst index `hurst`.
    Fbm { hurst: T },
    /// `(st)^{α/2} ∫ μ(da) cos(a ln(s/t))`.
    Spectral { alpha: T, measure: SpectralMeasure<T> },
}

impl<T: Real> Kernel<T> {
    pub fn fbm(hurst: T) -> Result<Self> {
        let k = Kernel::Fbm { hurst };
        k.validate()?;
        Ok(k)
    }

    pub fn spectral(alpha: T, measure: SpectralMeasure<T>) -> Result<Self> {
        let k = Kernel::Spectral { alpha, measure };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Kernel::Fbm { hurst } => {
                if !(*hurst > T::zero() && *hurst < T::one()) {
                    return domain(format!("Hurst index must lie in (0, 1), got {hurst}"));
                }
            }
            Kernel::Spectral { alpha, measure } => {
                if !(*alpha > T::zero() && alpha.is_finite()) {
                    return domain(format!("spectral kernel exponent must be positive, got {alpha}"));
                }
                // re-check atoms in case the enum was built by hand
                SpectralMeasure::new(measure.atoms.clone())?;
            }
        }
        Ok(())
    }

    /// The α for which `c(as, at) = a^α c(s, t)`.
    pub fn scaling_exponent(&self) -> T {
        match self {
            Kernel::Fbm { hurst } => T::lit(2.0) * *hurst,
            Kernel::Spectral { alpha, .. } => *alpha,
        }
    }

    pub fn cov(&self, s: T, t: T) -> Result<T> {
        match self {
            Kernel::Fbm { hurst } => fbm_cov(*hurst, s, t),
            Kernel::Spectral { alpha, measure } => spectral_cov(*alpha, measure, s, t),
        }
    }

    /// Whether evaluation at `t = 0` is meaningful for sampling.
    pub fn allows_zero_time(&self) -> bool {
        matches!(self, Kernel::Fbm { .. })
    }
}

/// fBm covariance `½(|t|^{2H} + |s|^{2H} - |t - s|^{2H})`.
pub fn fbm_cov<T: Real>(hurst: T, s: T, t: T) -> Result<T> {
    if !(hurst > T::zero() && hurst < T::one()) {
        return domain(format!("Hurst index must lie in (0, 1), got {hurst}"));
    }
    if s < T::zero() || t < T::zero() {
        return domain(format!("fbm covariance needs nonnegative times, got ({s}, {t})"));
    }
    if hurst == T::lit(0.5) {
        return Ok(s.min(t));
    }
    let e = T::lit(2.0) * hurst;
    Ok(T::lit(0.5) * (t.abs().powf(e) + s.abs().powf(e) - (t - s).abs().powf(e)))
}

/// Spectral covariance `(st)^{α/2} Σ_j w_j cos(a_j ln(s/t))`.
///
/// `c(0, ·) = 0` by continuity of the prefactor.
pub fn spectral_cov<T: Real>(alpha: T, mu: &SpectralMeasure<T>, s: T, t: T) -> Result<T> {
    if !(alpha > T::zero()) {
        return domain(format!("spectral kernel exponent must be positive, got {alpha}"));
    }
    if s < T::zero() || t < T::zero() || !s.is_finite() || !t.is_finite() {
        return domain(format!("spectral covariance needs times >= 0, got ({s}, {t})"));
    }
    if s == T::zero() || t == T::zero() {
        return Ok(T::zero());
    }
    let prefactor = (s * t).powf(alpha / T::lit(2.0));
    Ok(prefactor * mu.cosine_transform((s / t).ln()))
}

/// `M[i][j] = c(grid[i], grid[j])`.
pub fn cov_matrix<T: Real>(k: &Kernel<T>, grid: &TimeGrid<T>) -> Result<SymMatrix<T>> {
    k.validate()?;
    let pts = grid.points();
    SymMatrix::from_fn_symmetric(pts.len(), |i, j| k.cov(pts[i], pts[j]))
}

/// Checks `c(as, at) = a^α c(s, t)` over all grid pairs.
///
/// The statistic is `max |c(as,at) - a^α c(s,t)| / max(1, |c(s,t)|)`.
pub fn check_scaling<T: Real>(k: &Kernel<T>, alpha: T, a: T, grid: &TimeGrid<T>, tol: T) -> Result<TestReport> {
    if !(tol > T::zero()) {
        return domain("scaling tolerance must be positive");
    }
    if !(a > T::zero()) {
        return domain(format!("scaling factor must be positive, got {a}"));
    }
    let pts = grid.points();
    let factor = a.powf(alpha);
    let mut worst = T::zero();
    for (i, &s) in pts.iter().enumerate() {
        for &t in &pts[i..] {
            let base = k.cov(s, t)?;
            let scaled = k.cov(a * s, a * t)?;
            let err = (scaled - factor * base).abs() / base.abs().max(T::one());
            if err.is_nan() || err > worst {
                worst = err;
            }
        }
    }
    Ok(TestReport::distance("check_scaling", worst.as_f64(), tol.as_f64(), pts.len(), 0)
        .with_detail("alpha", alpha.as_f64())
        .with_detail("a", a.as_f64())
        .with_detail("kernel_exponent", k.scaling_exponent().as_f64()))
}

/// Smallest eigenvalue of a symmetric matrix; callers compare it with `-tol`.
pub fn psd_check<T: Real>(m: &SymMatrix<T>) -> Result<T> {
    min_eigenvalue(m)
}

/// Covariance of the Lamperti transform `e^{-αy/2} G_{e^y}`.
pub fn lamperti_cov<T: Real>(k: &Kernel<T>, alpha: T, y: T, z: T) -> Result<T> {
    let half = T::lit(0.5);
    Ok((-alpha * (y + z) * half).exp() * k.cov(y.exp(), z.exp())?)
}
