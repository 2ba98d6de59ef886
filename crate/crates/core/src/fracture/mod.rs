//! Impacts, projection onto fracture modes, fault activation and the per-shape
//! pattern generation loop.

pub mod generate;
pub mod impact;
pub mod pattern;

pub use generate::{generate_fractures, ImpactConfig};
pub use impact::{project_impact, sample_impact, ImpactSample};
pub use pattern::{extract_pattern, FracturePattern, Provenance};
