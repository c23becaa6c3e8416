//! Statistical machinery: empirical characteristic functions, KS tests,
//! covariance estimation, the α-IDT checks and threshold calibration.

mod calibrate;
mod checks;
mod cov;
mod ecf;
mod ks;

pub use crate::report::{Convention, TestReport};
pub use calibrate::{calibrate, empirical_quantile, min_reps, Calibration, TestKind};
pub use checks::{
    association_test, idt_test, idt_test_with_mode, selfsimilarity_test, stability_test, stationarity_test,
    temporal_sd_test, EcfDesign, IdtMode,
};
pub use cov::cov_estimate;
pub use ecf::{ecf, ecf_probes, EcfEvaluation, MarginalProbe, ThetaGrid, MAX_MARGINAL_DIM, STANDARD_COMPONENTS};
pub use ks::{kolmogorov_q, ks_one_sample, ks_two_sample};
