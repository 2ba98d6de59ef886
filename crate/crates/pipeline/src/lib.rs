//! Batch dataset generation, dataset statistics and the `bbx` command line tool.

pub mod config;
pub mod convexity;
pub mod error;
pub mod explode;
pub mod manifest;
pub mod run;
pub mod stats;

pub use config::PipelineConfig;
pub use convexity::convexity_rank;
pub use error::{PipelineError, Result};
pub use explode::explode_view_export;
pub use manifest::{Category, DatasetManifest, ShapeRecord, Status};
pub use run::{process_shape, run_pipeline, simulate, Simulation};
pub use stats::{dataset_percentiles, format_table, percentile_nearest_rank, StatsReport};
