use std::path::{Path, PathBuf};

use bbx_core::fem::Material;
use bbx_core::fracture::ImpactConfig;
use bbx_core::modes::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};

/// Settings for a dataset generation run, read from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Files, directories (all `.obj` files inside, recursively) or glob patterns.
    pub inputs: Vec<String>,
    pub output: PathBuf,
    pub seed: u64,
    /// Cells along the longest side of the signed distance grid.
    pub grid_n: usize,
    /// Cells along the longest side of the cage grid; its spacing is the cage offset.
    pub cage_res: usize,
    /// Cells along the longest side of the simulation voxel grid.
    pub tet_res: usize,
    /// Worker threads; `None` uses `BBX_WORKERS` or all cores.
    pub workers: Option<usize>,
    /// Also store the mode matrix in every archive.
    pub store_modes: bool,
    /// Write the cage and tet boundary surfaces next to each archive.
    pub export_cages: bool,
    pub material: Material,
    pub modes: SolverConfig,
    pub fracture: ImpactConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            output: PathBuf::from("out"),
            seed: 0,
            grid_n: 100,
            cage_res: 32,
            tet_res: 4,
            workers: None,
            store_modes: false,
            export_cages: false,
            material: Material::default(),
            modes: SolverConfig::default(),
            fracture: ImpactConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        let cfg: Self = toml::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if self.grid_n < 8 {
            return bad(format!("grid_n must be at least 8, got {}", self.grid_n));
        }
        if self.cage_res < 2 || self.cage_res > self.grid_n {
            return bad(format!("cage_res must be in [2, grid_n], got {}", self.cage_res));
        }
        if self.tet_res < 1 || self.tet_res > self.cage_res {
            return bad(format!("tet_res must be in [1, cage_res], got {}", self.tet_res));
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        if self.modes.k < self.fracture.mode_patterns {
            return bad(format!(
                "{} mode patterns need at least as many modes, k = {}",
                self.fracture.mode_patterns, self.modes.k
            ));
        }
        self.material.validate()?;
        self.modes.validate()?;
        self.fracture.validate()?;
        Ok(())
    }

    pub fn patterns_per_shape(&self) -> usize {
        self.fracture.mode_patterns + self.fracture.impact_patterns
    }
}
