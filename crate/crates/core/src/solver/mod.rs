//! Common zeros of the median-offset fields and the rhombs they produce.

mod field;
mod fixed_point;
mod miranda;
mod rhomb;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use field::{FnField, MedianField, Orientation, SignField};
pub use fixed_point::fixed_point_solve;
pub use miranda::{miranda_root, SearchBox};
pub use rhomb::{inscribe_rhomb, search_box, verify_rhomb, ResidualSummary, Rhomb, RhombRecord, VerificationReport, VERIFY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Box diameter and residual threshold.
    pub root_tol: f64,
    /// Maximum number of splits along any single axis.
    pub max_depth: usize,
    /// Samples per axis on each face grid.
    pub face_samples: usize,
    /// Step factor of the fixed-point iteration.
    pub damping: f64,
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            root_tol: 1e-9,
            max_depth: 60,
            face_samples: 5,
            damping: 0.7,
            max_iters: 500,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.root_tol > 0.0 && self.root_tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("root_tol must be positive, got {}", self.root_tol)));
        }
        if self.face_samples < 2 {
            return Err(Error::InvalidArgument(format!("face_samples must be >= 2, got {}", self.face_samples)));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidArgument(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    FixedPoint,
    MirandaBisection,
    Hybrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub method: Method,
    pub iterations: usize,
    /// Max over fields of `|field|` at the returned point.
    pub final_residual: f64,
    pub boxes_explored: usize,
    pub converged: bool,
}
