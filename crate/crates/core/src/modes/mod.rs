//! Elastic eigenmodes and fracture modes.

pub mod elastic;
pub mod export;
pub mod fracture;
mod partition;
pub(crate) mod rigid;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use elastic::{elastic_modes, ElasticModes};
pub use export::{displaced_mode_mesh, mode_obj};
pub use fracture::{fracture_modes, mode_fault_faces, FractureModes};

/// Parameters of the fracture-mode solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Number of modes.
    pub k: usize,
    /// Weight of the discontinuity energy.
    pub omega: f64,
    /// Reweighting steps used to sharpen the smooth fields before sweeping.
    pub max_iters: usize,
    /// Inner eigen-solver iterations per reweighting step.
    pub inner_iters: usize,
    /// Relative objective change below which a mode counts as converged.
    pub tol_rel: f64,
    /// Random initializations per mode; the best is kept.
    pub restarts: usize,
    pub seed: u64,
    /// Jump norm above which a face is part of a mode's fault.
    pub eps_fault: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            k: 20,
            omega: 1e-3,
            max_iters: 16,
            inner_iters: 20,
            tol_rel: 1e-9,
            restarts: 1,
            seed: 0,
            eps_fault: 1e-3,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Precondition("k must be at least 1".into()));
        }
        if !(self.omega > 0.0) || !(self.tol_rel > 0.0) || !(self.eps_fault > 0.0) {
            return Err(Error::Precondition(
                "omega, tol_rel and eps_fault must be positive".into(),
            ));
        }
        if self.restarts == 0 || self.inner_iters == 0 {
            return Err(Error::Precondition("restarts and inner_iters must be positive".into()));
        }
        Ok(())
    }
}
