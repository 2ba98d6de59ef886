use serde::{Deserialize, Serialize};

use super::chamfer::chamfer_distance;
use super::metrics::AssemblyInstance;
use crate::geom::vec::mat3_frobenius_sq_diff;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LossWeights {
    pub rot: f64,
    pub shape: f64,
    pub chamfer: f64,
    pub point: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            rot: 0.2,
            shape: 1.0,
            chamfer: 10.0,
            point: 1.0,
        }
    }
}

impl LossWeights {
    pub fn is_valid(&self) -> bool {
        [self.rot, self.shape, self.chamfer, self.point]
            .iter()
            .all(|w| *w >= 0.0)
    }
}

/// `Σ ‖T − T*‖² + λ_rot ‖Rᵀ R* − I‖²_F`, with the rotation term evaluated as the equal
/// `‖R* − R‖²_F` so it vanishes exactly at the ground truth.
pub fn loss_pose<T: Real>(inst: &AssemblyInstance<T>, lambda_rot: T) -> T {
    inst.predicted()
        .iter()
        .zip(&inst.gt)
        .map(|(q, g)| (q.t - g.t).norm_squared() + lambda_rot * mat3_frobenius_sq_diff(&g.r, &q.r))
        .sum()
}

/// `Σ CD(R P, R* P) + λ_shape CD(S, S*)`.
pub fn loss_chamfer<T: Real>(inst: &AssemblyInstance<T>, lambda_shape: T) -> T {
    let per_piece: T = inst
        .pieces
        .iter()
        .zip(inst.predicted().iter().zip(&inst.gt))
        .map(|(c, (q, g))| {
            let a: Vec<_> = c.points.iter().map(|&p| q.rotate(p)).collect();
            let b: Vec<_> = c.points.iter().map(|&p| g.rotate(p)).collect();
            chamfer_distance(&a, &b)
        })
        .sum();
    per_piece + lambda_shape * chamfer_distance(&inst.assembled(true).points, &inst.assembled(false).points)
}

/// `Σ_i Σ_j ‖R_i p_ij − R*_i p_ij‖²`.
pub fn loss_point<T: Real>(inst: &AssemblyInstance<T>) -> T {
    inst.pieces
        .iter()
        .zip(inst.predicted().iter().zip(&inst.gt))
        .map(|(c, (q, g))| {
            c.points
                .iter()
                .map(|&p| (q.rotate(p) - g.rotate(p)).norm_squared())
                .sum::<T>()
        })
        .sum()
}

/// `L_pose + λ_chamfer L_chamfer + λ_point L_point`.
pub fn loss_total<T: Real>(inst: &AssemblyInstance<T>, w: &LossWeights) -> T {
    loss_pose(inst, T::lit(w.rot))
        + T::lit(w.chamfer) * loss_chamfer(inst, T::lit(w.shape))
        + T::lit(w.point) * loss_point(inst)
}
