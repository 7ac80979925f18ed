//! Uniform time grids starting at zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform time grid `t_k = k * step`, `k = 0..len`, in units of `1/omega0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    points: Vec<f64>,
    step: f64,
}

impl TimeGrid {
    /// `samples` equally spaced points covering `[0, t_max]`.
    pub fn uniform(t_max: f64, samples: usize) -> Result<Self> {
        if samples == 0 {
            return Err(Error::param(
                "samples",
                "grid must contain at least one point",
            ));
        }
        if samples == 1 {
            return Ok(TimeGrid {
                points: vec![0.0],
                step: 0.0,
            });
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::param(
                "t_max",
                format!("must be finite and > 0, got {t_max}"),
            ));
        }
        let step = t_max / (samples - 1) as f64;
        let points = (0..samples).map(|k| k as f64 * step).collect();
        Ok(TimeGrid { points, step })
    }

    /// Validate an explicit list of times as a uniform grid starting at 0.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        let Some(&first) = points.first() else {
            return Err(Error::param("t_grid", "grid is empty"));
        };
        if first != 0.0 {
            return Err(Error::param(
                "t_grid",
                format!("grid must start at 0, starts at {first}"),
            ));
        }
        if points.len() == 1 {
            return Ok(TimeGrid { points, step: 0.0 });
        }
        let step = points[1] - points[0];
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::param("t_grid", "grid must be strictly increasing"));
        }
        for (k, w) in points.windows(2).enumerate() {
            let d = w[1] - w[0];
            if !(d > 0.0) {
                return Err(Error::param("t_grid", "grid must be strictly increasing"));
            }
            if (d - step).abs() > 1e-9 * step.max(w[1].abs() * 1e-6) {
                return Err(Error::param(
                    "t_grid",
                    format!(
                        "grid is not uniform at index {}: spacing {d} vs {step}",
                        k + 1
                    ),
                ));
            }
        }
        Ok(TimeGrid { points, step })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Grid spacing; zero for a singleton grid.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn t_max(&self) -> f64 {
        *self.points.last().expect("grid is never empty")
    }
}
