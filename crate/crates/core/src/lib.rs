//! Simulation and statistical verification of α-IDT processes.
//!
//! A process `X` is α-IDT when `(X_{n^{1/α} t})_t` has the law of the sum
//! of `n` independent copies of `X`, for every `n >= 1`. This crate
//! generates sample-path ensembles for the standard constructions (stable
//! and power lines, Gaussian kernels such as fractional Brownian motion,
//! time-changed and subordinated Lévy processes, mixtures) and checks the
//! distributional identities with empirical characteristic functions and
//! Kolmogorov–Smirnov tests.
//!
//! Kernel and linear-algebra code is generic over [`Real`] (`f32`, `f64`);
//! the aliases below fix it to `f64`.

pub mod error;
pub mod grid;
pub mod kernels;
pub mod linalg;
pub mod processes;
pub mod randkit;
pub mod report;
pub mod scalar;
pub mod statlab;
pub mod transforms;

pub use error::{IdtError, Result};
pub use grid::{Axis, TimeGrid as GenericTimeGrid};
pub use kernels::{Kernel as GenericKernel, SpectralMeasure as GenericSpectralMeasure};
pub use processes::{LevyFamily, PathEnsemble, ProcessSpec};
pub use randkit::{RngState, StableParams};
pub use report::TestReport;
pub use scalar::Real;

pub type TimeGrid = grid::TimeGrid<f64>;
pub type TimeGrid32 = grid::TimeGrid<f32>;
pub type Kernel = kernels::Kernel<f64>;
pub type Kernel32 = kernels::Kernel<f32>;
pub type SpectralMeasure = kernels::SpectralMeasure<f64>;
pub type SpectralMeasure32 = kernels::SpectralMeasure<f32>;
pub type SymMatrix = linalg::SymMatrix<f64>;
pub type SymMatrix32 = linalg::SymMatrix<f32>;
