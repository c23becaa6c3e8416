//! Deterministic, splittable random numbers and the elementary samplers
//! used by every path generator.
//!
//! [`RngState`] is a counter-based ChaCha8 stream addressed by a
//! `(seed, stream)` pair. Ensembles draw path `i` from stream `i`, so the
//! output never depends on scheduling.

use std::f64::consts::PI;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a tag. Distinct tags give
/// unrelated seeds.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    mix64(seed ^ mix64(tag.wrapping_add(GOLDEN_GAMMA)))
}

/// Position in the random-number space: a seed and a substream index.
#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    stream: u64,
    core: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut core = ChaCha8Rng::seed_from_u64(seed);
        core.set_stream(stream);
        Self { seed, stream, core }
    }

    pub fn from_seed(seed: u64) -> Self {
        Self::new(seed, 0)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Seed used for an ensemble generated from this state. Stream 0 maps to
    /// the seed itself; other streams are folded into a derived seed.
    pub fn ensemble_seed(&self) -> u64 {
        if self.stream == 0 {
            self.seed
        } else {
            derive_seed(self.seed, self.stream)
        }
    }

    /// An independent state for a sub-task labelled `tag`.
    pub fn fork(&self, tag: u64) -> RngState {
        RngState::new(derive_seed(self.ensemble_seed(), tag), 0)
    }

    /// Uniform draw strictly inside (0, 1).
    pub fn next_uniform(&mut self) -> f64 {
        // 52 random bits centred in their cell: the extremes are 2^-53 and 1 - 2^-53.
        let bits = self.core.next_u64() >> 12;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
    }

    pub fn sample_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.core)
    }

    /// Exponential(1) draw.
    pub fn sample_exp(&mut self) -> f64 {
        -self.next_uniform().ln()
    }

    /// Strictly stable draw with unit scale; see [`StableParams`].
    pub fn sample_stable(&mut self, p: StableParams) -> f64 {
        let alpha = p.index();
        let beta = p.skew();
        let v = PI * (self.next_uniform() - 0.5);
        let w = self.sample_exp();
        if alpha == 1.0 {
            // symmetric Cauchy
            return v.tan();
        }
        if alpha == 2.0 {
            return 2.0 * v.sin() * w.sqrt();
        }
        let zeta = beta * (PI * alpha / 2.0).tan();
        let shift = zeta.atan() / alpha;
        let scale = (1.0 + zeta * zeta).powf(1.0 / (2.0 * alpha));
        let arg = alpha * (v + shift);
        let x = scale * arg.sin() / v.cos().powf(1.0 / alpha)
            * ((v - arg).cos() / w).powf((1.0 - alpha) / alpha);
        if beta == 1.0 && alpha < 1.0 {
            // totally skewed with index < 1 is supported on [0, inf)
            x.max(0.0)
        } else {
            x
        }
    }

    /// Gamma draw with the given shape and rate (mean `shape / rate`).
    pub fn sample_gamma(&mut self, shape: f64, rate: f64) -> Result<f64> {
        if !(shape > 0.0 && shape.is_finite()) || !(rate > 0.0 && rate.is_finite()) {
            return domain(format!("gamma needs shape > 0 and rate > 0, got ({shape}, {rate})"));
        }
        let g = Gamma::new(shape, 1.0 / rate)
            .map_err(|e| crate::IdtError::Domain(format!("gamma({shape}, {rate}): {e}")))?;
        Ok(g.sample(&mut self.core))
    }

    /// Poisson count with mean `lambda >= 0`.
    pub fn sample_poisson(&mut self, lambda: f64) -> Result<u64> {
        if lambda == 0.0 {
            return Ok(0);
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return domain(format!("poisson mean must be >= 0, got {lambda}"));
        }
        let p = Poisson::new(lambda)
            .map_err(|e| crate::IdtError::Domain(format!("poisson({lambda}): {e}")))?;
        let k: f64 = p.sample(&mut self.core);
        Ok(k as u64)
    }
}

/// Parameters of a strictly stable law with unit scale and no shift.
///
/// The characteristic function is `exp(-|θ|^α (1 - iβ sign(θ) tan(πα/2)))`
/// for `α != 1`; `α = 2` is Normal(0, 2) and `α = 1, β = 0` is the standard
/// Cauchy law. Asymmetric laws with `α = 1` are rejected since they are not
/// strictly stable without a drift correction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    index: f64,
    skew: f64,
}

impl StableParams {
    pub fn new(index: f64, skew: f64) -> Result<Self> {
        if !(index > 0.0 && index <= 2.0) {
            return domain(format!("stable index must lie in (0, 2], got {index}"));
        }
        if !(-1.0..=1.0).contains(&skew) {
            return domain(format!("stable skew must lie in [-1, 1], got {skew}"));
        }
        if index == 1.0 && skew != 0.0 {
            return domain("strictly 1-stable laws are restricted to skew = 0");
        }
        Ok(Self { index, skew })
    }

    pub fn symmetric(index: f64) -> Result<Self> {
        Self::new(index, 0.0)
    }

    pub fn index(&self) -> f64 {
        self.index
    }

    pub fn skew(&self) -> f64 {
        self.skew
    }
}
