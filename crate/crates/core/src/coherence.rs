//! Relative entropy of coherence, in nats.

use std::fmt::Write as _;

use crate::dynamics::{Solver, Trajectory};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::states::{DensityMatrix, DIM};

/// Eigenvalues below this are treated as exact zeros in `-l ln l`.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

fn entropy_of_spectrum(values: impl IntoIterator<Item = f64>) -> Result<f64> {
    let mut s = 0.0;
    for l in values {
        if !l.is_finite() {
            return Err(Error::Numerical("non-finite eigenvalue in entropy".into()));
        }
        if l > EIGENVALUE_FLOOR {
            s -= l * l.ln();
        }
    }
    Ok(s)
}

/// `S(rho) = -tr rho ln rho`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of_spectrum(rho.eigenvalues())
}

/// `C_R(rho) = S(diag rho) - S(rho)`.
pub fn relative_entropy_of_coherence(rho: &DensityMatrix) -> Result<f64> {
    let diag = entropy_of_spectrum((0..DIM).map(|m| rho.get(m, m).re))?;
    Ok(diag - von_neumann_entropy(rho)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceTrajectory {
    pub grid: TimeGrid,
    pub c_r: Vec<f64>,
    pub scenario_hash: String,
    pub solver: Solver,
}

impl CoherenceTrajectory {
    pub fn times(&self) -> &[f64] {
        self.grid.points()
    }

    /// CSV with header `t,c_r`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,c_r\n");
        for (t, c) in self.grid.points().iter().zip(&self.c_r) {
            let _ = writeln!(s, "{t:.16e},{c:.16e}");
        }
        s
    }
}

/// Apply [`relative_entropy_of_coherence`] at every grid point.
pub fn coherence_of(trajectory: &Trajectory) -> Result<CoherenceTrajectory> {
    let upper = (DIM as f64).ln() + 1e-10;
    let c_r = trajectory
        .states
        .iter()
        .zip(trajectory.grid.points())
        .map(|(rho, &t)| {
            let c = relative_entropy_of_coherence(rho)?;
            if !(-1e-10..=upper).contains(&c) {
                return Err(Error::Numerical(format!(
                    "coherence {c} out of [0, ln 8] at t = {t}"
                )));
            }
            Ok(c.clamp(0.0, DIM as f64).min((DIM as f64).ln()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherenceTrajectory {
        grid: trajectory.grid.clone(),
        c_r,
        scenario_hash: trajectory.scenario_hash.clone(),
        solver: trajectory.solver,
    })
}
