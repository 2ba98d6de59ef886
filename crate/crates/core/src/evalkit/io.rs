//! JSON interchange: sampled assembly sets, predictions and metric reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::chamfer::{chamfer_distance_with, ChamferNorm};
use super::metrics::{part_accuracy, transform_errors_with, AssemblyInstance, EulerConvention, TranslationAggregation};
use super::pose::Pose;
use super::sampling::PointCloud;
use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Row-major rotation and translation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    pub r: [f64; 9],
    pub t: [f64; 3],
}

impl PoseRecord {
    pub fn to_pose(&self) -> Result<Pose<f64>> {
        let r = [0, 1, 2].map(|i| [self.r[3 * i], self.r[3 * i + 1], self.r[3 * i + 2]]);
        Pose::new(r, Vec3::from_array(self.t))
    }
}

impl From<&Pose<f64>> for PoseRecord {
    fn from(p: &Pose<f64>) -> Self {
        Self {
            r: std::array::from_fn(|k| p.r[k / 3][k % 3]),
            t: p.t.to_array(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceRecord {
    /// Canonical (centered, randomly rotated) points.
    pub points: Vec<[f64; 3]>,
    pub gt: PoseRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pred: Option<PoseRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub shape: String,
    pub category: String,
    pub pattern: usize,
    pub pieces: Vec<PieceRecord>,
}

impl InstanceRecord {
    pub fn to_instance(&self) -> Result<AssemblyInstance<f64>> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| PointCloud::new(p.points.iter().map(|&a| Vec3::from_array(a)).collect()))
            .collect::<Result<Vec<_>>>()?;
        let gt = self.pieces.iter().map(|p| p.gt.to_pose()).collect::<Result<Vec<_>>>()?;
        let pred = if self.pieces.iter().all(|p| p.pred.is_some()) {
            Some(
                self.pieces
                    .iter()
                    .map(|p| p.pred.unwrap().to_pose())
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        AssemblyInstance::new(pieces, gt, pred)
    }
}

/// A sampled assembly set; with `pred` filled in it is a predictions file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalSet {
    pub instances: Vec<InstanceRecord>,
}

/// Metrics averaged over instances. `cd_e3` is the chamfer distance between the
/// predicted and true assemblies, scaled by 10³.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub rmse_r: f64,
    pub mae_r: f64,
    pub rmse_t: f64,
    pub mae_t: f64,
    pub cd_e3: f64,
    pub pa: f64,
    pub instances: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalSettings {
    pub euler: EulerConvention,
    pub translation: TranslationAggregation,
    pub chamfer: ChamferNorm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub settings: EvalSettings,
    pub per_category: BTreeMap<String, MetricRow>,
    pub mean: MetricRow,
}

/// Metrics of one instance as a single-instance row.
pub fn evaluate_record(rec: &InstanceRecord, settings: &EvalSettings) -> Result<MetricRow> {
    let inst = rec.to_instance()?;
    if inst.pred.is_none() {
        return Err(Error::Precondition(format!(
            "instance {}#{} has no predictions",
            rec.shape, rec.pattern
        )));
    }
    let e = transform_errors_with(&inst, settings.euler, settings.translation);
    let cd = chamfer_distance_with(
        &inst.assembled(true).points,
        &inst.assembled(false).points,
        settings.chamfer,
    );
    Ok(MetricRow {
        rmse_r: e.rmse_r,
        mae_r: e.mae_r,
        rmse_t: e.rmse_t,
        mae_t: e.mae_t,
        cd_e3: cd * 1e3,
        pa: part_accuracy(&inst),
        instances: 1,
    })
}

fn mean_row<'a>(rows: impl Iterator<Item = &'a MetricRow>) -> MetricRow {
    let mut acc = MetricRow::default();
    for r in rows {
        acc.rmse_r += r.rmse_r;
        acc.mae_r += r.mae_r;
        acc.rmse_t += r.rmse_t;
        acc.mae_t += r.mae_t;
        acc.cd_e3 += r.cd_e3;
        acc.pa += r.pa;
        acc.instances += 1;
    }
    if acc.instances > 0 {
        let n = acc.instances as f64;
        for v in [
            &mut acc.rmse_r,
            &mut acc.mae_r,
            &mut acc.rmse_t,
            &mut acc.mae_t,
            &mut acc.cd_e3,
            &mut acc.pa,
        ] {
            *v /= n;
        }
    }
    acc
}

/// Per-category and overall means of per-instance rows, accumulated in input order.
pub fn aggregate(rows: &[(String, MetricRow)], settings: EvalSettings) -> MetricsReport {
    let mut by_cat: BTreeMap<String, Vec<MetricRow>> = BTreeMap::new();
    for (cat, row) in rows {
        by_cat.entry(cat.clone()).or_default().push(*row);
    }
    MetricsReport {
        settings,
        per_category: by_cat.iter().map(|(k, v)| (k.clone(), mean_row(v.iter()))).collect(),
        mean: mean_row(rows.iter().map(|(_, r)| r)),
    }
}
