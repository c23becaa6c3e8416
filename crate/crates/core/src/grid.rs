use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::Real;

/// What the grid values index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Ordinary time `t >= 0`.
    #[default]
    Time,
    /// Logarithmic time `y = ln t`, produced by the Lamperti transform.
    LogTime,
}

/// Strictly increasing sampling points shared by every path of an ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid<T = f64> {
    points: Vec<T>,
    #[serde(default)]
    axis: Axis,
}

impl<T: Real> TimeGrid<T> {
    /// A time grid: nonempty, finite, nonnegative and strictly increasing.
    pub fn new(points: Vec<T>) -> Result<Self> {
        Self::check_increasing(&points)?;
        if points[0] < T::zero() {
            return domain(format!("time grid must be nonnegative, first point is {}", points[0]));
        }
        Ok(Self { points, axis: Axis::Time })
    }

    /// A log-time grid; negative values are allowed.
    pub fn log_axis(points: Vec<T>) -> Result<Self> {
        Self::check_increasing(&points)?;
        Ok(Self { points, axis: Axis::LogTime })
    }

    fn check_increasing(points: &[T]) -> Result<()> {
        if points.is_empty() {
            return domain("time grid must be nonempty");
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return domain(format!("time grid contains non-finite point {p}"));
        }
        if let Some(w) = points.windows(2).find(|w| !(w[0] < w[1])) {
            return domain(format!("time grid must be strictly increasing ({} then {})", w[0], w[1]));
        }
        Ok(())
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn contains_zero(&self) -> bool {
        self.points.iter().any(|&t| t == T::zero())
    }

    /// Every point multiplied by `factor > 0`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        if !(factor > T::zero() && factor.is_finite()) {
            return domain(format!("grid scale factor must be positive, got {factor}"));
        }
        let pts = self.points.iter().map(|&t| t * factor).collect();
        match self.axis {
            Axis::Time => Self::new(pts),
            Axis::LogTime => Self::log_axis(pts),
        }
    }

    /// Every point divided by `factor > 0`.
    pub fn divided(&self, factor: T) -> Result<Self> {
        if !(factor > T::zero() && factor.is_finite()) {
            return domain(format!("grid divisor must be positive, got {factor}"));
        }
        let pts = self.points.iter().map(|&t| t / factor).collect();
        match self.axis {
            Axis::Time => Self::new(pts),
            Axis::LogTime => Self::log_axis(pts),
        }
    }
}
