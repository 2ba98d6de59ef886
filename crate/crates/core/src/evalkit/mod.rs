//! Point sampling, pose bookkeeping, assembly metrics and training losses.

pub mod chamfer;
pub mod io;
pub mod losses;
pub mod metrics;
pub mod pose;
pub mod sampling;
pub mod split;

pub use chamfer::{chamfer_distance, chamfer_distance_brute, chamfer_distance_with, ChamferNorm};
pub use io::{
    aggregate, evaluate_record, EvalSet, EvalSettings, InstanceRecord, MetricRow, MetricsReport, PieceRecord,
    PoseRecord,
};
pub use losses::{loss_chamfer, loss_point, loss_pose, loss_total, LossWeights};
pub use metrics::{
    part_accuracy, transform_errors, transform_errors_with, AssemblyInstance, EulerConvention, TransformErrors,
    TranslationAggregation, PA_THRESHOLD,
};
pub use pose::{canonicalize_piece, euler_angles, random_rotation, rotation_from_euler, Pose};
pub use sampling::{sample_point_cloud, PointCloud, DEFAULT_POINTS};
pub use split::split_dataset;
