use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::kernels::Kernel;
use crate::randkit::StableParams;

/// Lévy process families with closed-form increment laws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LevyFamily {
    /// `σ W_t + b t`.
    Brownian { volatility: f64, drift: f64 },
    /// Strictly stable motion: the increment over `dt` is `dt^{1/index} S`.
    StableMotion { index: f64, skew: f64 },
    /// Gamma subordinator: the increment over `dt` is Gamma(shape·dt, rate).
    GammaSubordinator { shape: f64, rate: f64 },
    /// Poisson(intensity·dt) many Normal(jump_mean, jump_sd) jumps.
    CompoundPoisson { intensity: f64, jump_mean: f64, jump_sd: f64 },
    /// Deterministic drift `rate · t`; a degenerate Lévy process.
    Deterministic { rate: f64 },
}

impl LevyFamily {
    pub fn brownian(volatility: f64, drift: f64) -> Result<Self> {
        Self::checked(LevyFamily::Brownian { volatility, drift })
    }

    pub fn stable_motion(index: f64, skew: f64) -> Result<Self> {
        Self::checked(LevyFamily::StableMotion { index, skew })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Self::checked(LevyFamily::GammaSubordinator { shape, rate })
    }

    pub fn compound_poisson(intensity: f64, jump_mean: f64, jump_sd: f64) -> Result<Self> {
        Self::checked(LevyFamily::CompoundPoisson { intensity, jump_mean, jump_sd })
    }

    fn checked(f: Self) -> Result<Self> {
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LevyFamily::Brownian { volatility, drift } => {
                if !(volatility > 0.0 && volatility.is_finite()) || !drift.is_finite() {
                    return domain(format!("brownian needs volatility > 0 and finite drift, got ({volatility}, {drift})"));
                }
            }
            LevyFamily::StableMotion { index, skew } => {
                StableParams::new(index, skew)?;
            }
            LevyFamily::GammaSubordinator { shape, rate } => {
                if !(shape > 0.0 && shape.is_finite() && rate > 0.0 && rate.is_finite()) {
                    return domain(format!("gamma subordinator needs shape, rate > 0, got ({shape}, {rate})"));
                }
            }
            LevyFamily::CompoundPoisson { intensity, jump_mean, jump_sd } => {
                if !(intensity >= 0.0 && intensity.is_finite()) || !jump_mean.is_finite() || !(jump_sd >= 0.0 && jump_sd.is_finite()) {
                    return domain(format!(
                        "compound poisson needs intensity >= 0 and jump sd >= 0, got ({intensity}, {jump_mean}, {jump_sd})"
                    ));
                }
            }
            LevyFamily::Deterministic { rate } => {
                if !rate.is_finite() {
                    return domain("deterministic rate must be finite");
                }
            }
        }
        Ok(())
    }

    /// True when every path is nondecreasing (a subordinator).
    pub fn is_nondecreasing(&self) -> bool {
        match *self {
            LevyFamily::GammaSubordinator { .. } => true,
            LevyFamily::StableMotion { index, skew } => skew == 1.0 && index < 1.0,
            LevyFamily::Deterministic { rate } => rate >= 0.0,
            LevyFamily::CompoundPoisson { intensity, jump_mean, jump_sd } => {
                intensity == 0.0 || (jump_sd == 0.0 && jump_mean >= 0.0)
            }
            LevyFamily::Brownian { .. } => false,
        }
    }
}

/// Declarative description of an α-IDT process family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessSpec {
    /// `X_t = t S_α` with `S_α` symmetric strictly α-stable.
    StableLine { alpha: f64 },
    /// `X_t = t^α S` with `S` standard Cauchy.
    PowerLine { alpha: f64 },
    /// Centered Gaussian process with the given covariance kernel.
    GaussianKernel { kernel: Kernel<f64> },
    /// `L_{t^α}` for a Lévy process `L`.
    AdditiveTimeChange { family: LevyFamily, alpha: f64 },
    /// `L_{ξ_t}` with `ξ` drawn from `chrono`, independent of `L`.
    Subordinated { family: LevyFamily, chrono: Box<ProcessSpec> },
    /// `Σ_i w_i X_{u_i t}` over one trajectory of `base`; atoms are `(u_i, w_i)`.
    Mixture { base: Box<ProcessSpec>, atoms: Vec<(f64, f64)> },
    /// `Σ_j w_j L_{(u_j t)^α}` over one subordinator trajectory.
    PhiFunctional { subordinator: LevyFamily, atoms: Vec<(f64, f64)>, alpha: f64 },
}

impl ProcessSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessSpec::StableLine { alpha } => {
                StableParams::symmetric(*alpha)?;
            }
            ProcessSpec::PowerLine { alpha } | ProcessSpec::AdditiveTimeChange { alpha, .. } => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return domain(format!("exponent must be positive, got {alpha}"));
                }
                if let ProcessSpec::AdditiveTimeChange { family, .. } = self {
                    family.validate()?;
                }
            }
            ProcessSpec::GaussianKernel { kernel } => kernel.validate()?,
            ProcessSpec::Subordinated { family, chrono } => {
                family.validate()?;
                chrono.validate()?;
                if !chrono.is_nondecreasing() {
                    return domain(format!("chronometer {} is not nondecreasing by construction", chrono.family_name()));
                }
            }
            ProcessSpec::Mixture { base, atoms } => {
                base.validate()?;
                check_atoms(atoms, false)?;
            }
            ProcessSpec::PhiFunctional { subordinator, atoms, alpha } => {
                subordinator.validate()?;
                if !subordinator.is_nondecreasing() {
                    return domain("phi functional needs a nondecreasing subordinator family");
                }
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return domain(format!("exponent must be positive, got {alpha}"));
                }
                check_atoms(atoms, true)?;
            }
        }
        Ok(())
    }

    /// The α for which the process is α-IDT.
    pub fn idt_exponent(&self) -> f64 {
        match self {
            ProcessSpec::StableLine { alpha }
            | ProcessSpec::PowerLine { alpha }
            | ProcessSpec::AdditiveTimeChange { alpha, .. }
            | ProcessSpec::PhiFunctional { alpha, .. } => *alpha,
            ProcessSpec::GaussianKernel { kernel } => kernel.scaling_exponent(),
            ProcessSpec::Subordinated { chrono, .. } => chrono.idt_exponent(),
            ProcessSpec::Mixture { base, .. } => base.idt_exponent(),
        }
    }

    /// True when every generated path is nondecreasing and starts at a
    /// nonnegative value, so the process can serve as a chronometer.
    pub fn is_nondecreasing(&self) -> bool {
        match self {
            ProcessSpec::AdditiveTimeChange { family, .. } => family.is_nondecreasing(),
            ProcessSpec::PhiFunctional { atoms, .. } => atoms.iter().all(|&(_, w)| w >= 0.0),
            ProcessSpec::Subordinated { family, chrono } => family.is_nondecreasing() && chrono.is_nondecreasing(),
            ProcessSpec::Mixture { base, atoms } => base.is_nondecreasing() && atoms.iter().all(|&(_, w)| w >= 0.0),
            ProcessSpec::StableLine { .. } | ProcessSpec::PowerLine { .. } | ProcessSpec::GaussianKernel { .. } => false,
        }
    }

    /// Short family name, e.g. `stable_line`.
    pub fn family_name(&self) -> &'static str {
        match self {
            ProcessSpec::StableLine { .. } => "stable_line",
            ProcessSpec::PowerLine { .. } => "power_line",
            ProcessSpec::GaussianKernel { .. } => "gaussian_kernel",
            ProcessSpec::AdditiveTimeChange { .. } => "additive_time_change",
            ProcessSpec::Subordinated { .. } => "subordinated",
            ProcessSpec::Mixture { .. } => "mixture",
            ProcessSpec::PhiFunctional { .. } => "phi_functional",
        }
    }

    /// Canonical one-line description, used as a lookup key.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }
}

fn check_atoms(atoms: &[(f64, f64)], nonnegative_weights: bool) -> Result<()> {
    if atoms.is_empty() {
        return domain("atom list must be nonempty");
    }
    for &(u, w) in atoms {
        if !(u > 0.0 && u.is_finite()) || !w.is_finite() {
            return domain(format!("atom ({u}, {w}) needs u > 0 and a finite weight"));
        }
        if nonnegative_weights && w < 0.0 {
            return domain(format!("atom ({u}, {w}) needs a nonnegative weight"));
        }
    }
    Ok(())
}
