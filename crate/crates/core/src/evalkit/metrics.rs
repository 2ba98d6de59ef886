use serde::{Deserialize, Serialize};

use super::chamfer::chamfer_distance;
use super::pose::{euler_angles, Pose};
use super::sampling::PointCloud;
use crate::error::{Error, Result};
use crate::geom::vec::{mat3_mul, mat3_transpose};
use crate::scalar::Real;

/// Chamfer threshold below which a part counts as correctly placed.
pub const PA_THRESHOLD: f64 = 0.01;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EulerConvention {
    /// `R = Rx(a) Ry(b) Rz(c)`.
    #[default]
    IntrinsicXyz,
    /// `R = Rz(c) Ry(b) Rx(a)`.
    ExtrinsicXyz,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslationAggregation {
    /// RMS and mean absolute value over all `3N` components of `T − T*`.
    #[default]
    Components,
    /// RMS and mean over the `N` norms `‖T − T*‖`.
    PieceNorms,
}

/// Pieces of one fractured shape with ground-truth and (optionally) predicted poses.
#[derive(Clone, Debug, PartialEq)]
pub struct AssemblyInstance<T> {
    pub pieces: Vec<PointCloud<T>>,
    pub gt: Vec<Pose<T>>,
    pub pred: Option<Vec<Pose<T>>>,
}

impl<T: Real> AssemblyInstance<T> {
    pub fn new(pieces: Vec<PointCloud<T>>, gt: Vec<Pose<T>>, pred: Option<Vec<Pose<T>>>) -> Result<Self> {
        if pieces.len() < 2 {
            return Err(Error::Precondition(format!(
                "assembly needs at least 2 pieces, got {}",
                pieces.len()
            )));
        }
        if gt.len() != pieces.len() || pred.as_ref().is_some_and(|p| p.len() != pieces.len()) {
            return Err(Error::Precondition("pose count does not match piece count".into()));
        }
        Ok(Self { pieces, gt, pred })
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub(crate) fn predicted(&self) -> &[Pose<T>] {
        self.pred.as_deref().expect("instance has no predicted poses")
    }

    /// Union of the posed pieces, under the predicted poses or the ground truth.
    pub fn assembled(&self, predicted: bool) -> PointCloud<T> {
        let poses = if predicted { self.predicted() } else { &self.gt };
        let points = self
            .pieces
            .iter()
            .zip(poses)
            .flat_map(|(c, q)| c.points.iter().map(move |&p| q.apply(p)))
            .collect();
        PointCloud { points }
    }
}

/// Percentage of pieces whose posed cloud is within [`PA_THRESHOLD`] chamfer of the truth.
pub fn part_accuracy<T: Real>(inst: &AssemblyInstance<T>) -> T {
    let pred = inst.predicted();
    let tau = T::lit(PA_THRESHOLD);
    let hits = inst
        .pieces
        .iter()
        .zip(pred.iter().zip(&inst.gt))
        .filter(|(c, (q, g))| chamfer_distance(&q.apply_cloud(c).points, &g.apply_cloud(c).points) < tau)
        .count();
    T::lit(100.0) * T::of_usize(hits) / T::of_usize(inst.len())
}

/// Rotation errors in degrees, translation errors in model units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TransformErrors<T> {
    pub rmse_r: T,
    pub mae_r: T,
    pub rmse_t: T,
    pub mae_t: T,
}

pub fn transform_errors<T: Real>(inst: &AssemblyInstance<T>) -> TransformErrors<T> {
    transform_errors_with(inst, EulerConvention::default(), TranslationAggregation::default())
}

fn wrap_degrees<T: Real>(deg: T) -> T {
    let full = T::lit(360.0);
    let half = T::lit(180.0);
    let mut d = deg - full * ((deg + half) / full).floor();
    if d <= -half {
        d += full;
    }
    d
}

/// Per piece, the relative rotation `Rᵀ R*` is split into Euler angles wrapped to
/// (−180°, 180°]; errors are RMS and mean absolute value over all `3N` angles.
pub fn transform_errors_with<T: Real>(
    inst: &AssemblyInstance<T>,
    convention: EulerConvention,
    aggregation: TranslationAggregation,
) -> TransformErrors<T> {
    let pred = inst.predicted();
    let (mut r2, mut r1, mut t2, mut t1) = (T::zero(), T::zero(), T::zero(), T::zero());
    for (q, g) in pred.iter().zip(&inst.gt) {
        let rel = mat3_mul(&mat3_transpose(&q.r), &g.r);
        for a in euler_angles(&rel, convention) {
            let d = wrap_degrees(a.to_degrees());
            r2 += d * d;
            r1 += d.abs();
        }
        let dt = q.t - g.t;
        match aggregation {
            TranslationAggregation::Components => {
                for c in 0..3 {
                    t2 += dt[c] * dt[c];
                    t1 += dt[c].abs();
                }
            }
            TranslationAggregation::PieceNorms => {
                t2 += dt.norm_squared();
                t1 += dt.norm();
            }
        }
    }
    let n = T::of_usize(inst.len());
    let angles = n * T::lit(3.0);
    let t_count = match aggregation {
        TranslationAggregation::Components => angles,
        TranslationAggregation::PieceNorms => n,
    };
    TransformErrors {
        rmse_r: (r2 / angles).sqrt(),
        mae_r: r1 / angles,
        rmse_t: (t2 / t_count).sqrt(),
        mae_t: t1 / t_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapping() {
        assert_eq!(wrap_degrees(-180.0), 180.0);
        assert_eq!(wrap_degrees(180.0), 180.0);
        assert!((wrap_degrees(190.0) + 170.0f64).abs() < 1e-12);
        assert_eq!(wrap_degrees(0.0), 0.0);
    }
}
