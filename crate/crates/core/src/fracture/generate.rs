use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::impact::{project_impact, sample_impact};
use super::pattern::{extract_pattern, FracturePattern, Provenance};
use crate::error::{Error, Result};
use crate::fem::DiscreteOperators;
use crate::geom::TetMesh;
use crate::modes::FractureModes;
use crate::scalar::Real;
use crate::segpack::super_segmentation;

/// Impact sampling and pattern acceptance parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImpactConfig {
    /// Interval the discontinuity threshold is drawn from.
    pub tau_range: (f64, f64),
    /// Gaussian falloff radius of an impact.
    pub falloff_sigma: f64,
    /// Impact magnitudes are log-uniform in this interval.
    pub magnitude_range: (f64, f64),
    /// Attempts allowed per accepted impact pattern.
    pub max_attempts: usize,
    /// Accepted piece counts, inclusive.
    pub piece_bounds: (usize, usize),
    /// Patterns taken directly from the first modes.
    pub mode_patterns: usize,
    /// Patterns generated from random impacts.
    pub impact_patterns: usize,
}

impl Default for ImpactConfig {
    fn default() -> Self {
        Self {
            tau_range: (0.05, 0.5),
            falloff_sigma: 0.2,
            magnitude_range: (0.1, 10.0),
            max_attempts: 1000,
            piece_bounds: (2, 100),
            mode_patterns: 20,
            impact_patterns: 80,
        }
    }
}

impl ImpactConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.tau_range;
        if !(lo > 0.0 && lo <= hi) {
            return Err(Error::Precondition(format!("invalid tau range ({lo}, {hi})")));
        }
        if !(self.falloff_sigma > 0.0) {
            return Err(Error::Precondition("falloff sigma must be positive".into()));
        }
        let (mlo, mhi) = self.magnitude_range;
        if !(mlo >= 0.0 && mlo <= mhi) {
            return Err(Error::Precondition(format!("invalid magnitude range ({mlo}, {mhi})")));
        }
        let (plo, phi) = self.piece_bounds;
        if plo > phi || self.max_attempts == 0 {
            return Err(Error::Precondition("invalid piece bounds or attempt budget".into()));
        }
        Ok(())
    }

    pub fn tau_mid(&self) -> f64 {
        0.5 * (self.tau_range.0 + self.tau_range.1)
    }

    fn accepts(&self, pieces: usize) -> bool {
        (self.piece_bounds.0..=self.piece_bounds.1).contains(&pieces)
    }
}

/// Mode patterns followed by impact patterns, all with piece counts inside the bounds.
///
/// Mode pattern `r` thresholds mode `r` at the middle of the tau range, falling back to the
/// lower end and then to the fault threshold when that leaves the mesh in one piece.
/// Impact patterns whose pieces would split an atomic piece of the super-segmentation are
/// rejected like out-of-bounds ones.
pub fn generate_fractures<T: Real>(
    mesh: &TetMesh<T>,
    ops: &DiscreteOperators<T>,
    modes: &FractureModes<T>,
    cfg: &ImpactConfig,
    seed: u64,
) -> Result<Vec<FracturePattern>> {
    cfg.validate()?;
    if modes.len() < cfg.mode_patterns {
        return Err(Error::Precondition(format!(
            "{} mode patterns requested but only {} modes available",
            cfg.mode_patterns,
            modes.len()
        )));
    }
    let mut patterns = Vec::with_capacity(cfg.mode_patterns + cfg.impact_patterns);
    let fault_tau = modes.eps_fault.to_f64_lossy();
    for (r, u) in modes.modes.iter().take(cfg.mode_patterns).enumerate() {
        let accepted = [cfg.tau_mid(), cfg.tau_range.0, fault_tau]
            .into_iter()
            .map(|tau| extract_pattern(ops, u, tau))
            .find(|p| cfg.accepts(p.piece_count));
        match accepted {
            Some(mut p) => {
                p.provenance = Provenance::Mode { mode: r };
                patterns.push(p);
            }
            None => {
                return Err(Error::Unfracturable(format!(
                    "mode {r} yields no pattern within the piece bounds"
                )))
            }
        }
    }

    let atomic = super_segmentation(ops, modes, modes.eps_fault).atomic_labels;
    let boundary = mesh.boundary_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..cfg.impact_patterns {
        let mut accepted = None;
        for attempt in 1..=cfg.max_attempts {
            let (w, impact) = sample_impact(mesh, &boundary, &mut rng, cfg);
            let tau = cfg.tau_range.0 + rng.random::<f64>() * (cfg.tau_range.1 - cfg.tau_range.0);
            let projected = project_impact(modes, ops, &w);
            let mut p = extract_pattern(ops, &projected, tau);
            if cfg.accepts(p.piece_count) && refines(&atomic, &p.labels) {
                p.provenance = Provenance::Impact {
                    impact,
                    seed,
                    attempts: attempt,
                };
                accepted = Some(p);
                break;
            }
        }
        match accepted {
            Some(p) => patterns.push(p),
            None => {
                return Err(Error::Unfracturable(format!(
                    "impact pattern {i}: no acceptable pattern in {} attempts",
                    cfg.max_attempts
                )))
            }
        }
    }
    Ok(patterns)
}

/// Whether every atomic piece lies inside a single piece of `labels`.
pub fn refines(atomic: &[usize], labels: &[usize]) -> bool {
    let count = atomic.iter().max().map_or(0, |&a| a + 1);
    let mut image = vec![usize::MAX; count];
    atomic.iter().zip(labels).all(|(&a, &l)| {
        if image[a] == usize::MAX {
            image[a] = l;
        }
        image[a] == l
    })
}
