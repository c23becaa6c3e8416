//! Sample-path ensembles for the α-IDT process families.

mod ensemble;
mod gphi;
pub mod io;
mod plan;
mod spec;

pub use crate::grid::TimeGrid;
pub use ensemble::PathEnsemble;
pub use gphi::{gphi_paths, StepFunction};
pub use plan::{additive_paths, gaussian_paths, generate, levy_increments, phi_functional_paths, subordinated_paths};
pub use spec::{LevyFamily, ProcessSpec};
