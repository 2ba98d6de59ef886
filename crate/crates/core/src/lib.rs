#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::type_complexity
)]

pub mod error;
pub mod evalkit;
pub mod fem;
pub mod fracture;
pub mod geom;
pub mod linalg;
pub mod modes;
pub mod scalar;
pub mod segpack;
pub mod unionfind;

pub use error::{Error, Result};
pub use scalar::Real;

pub type TetMesh = geom::TetMesh<f64>;
pub type SurfaceMesh = geom::SurfaceMesh<f64>;
pub type Vec3 = geom::Vec3<f64>;
pub type CornerField = fem::CornerField<f64>;
pub type DiscreteOperators = fem::DiscreteOperators<f64>;
pub type FractureModes = modes::FractureModes<f64>;
pub type Archive = segpack::Archive<f64>;
pub type PointCloud = evalkit::PointCloud<f64>;
pub type Pose = evalkit::Pose<f64>;
pub type AssemblyInstance = evalkit::AssemblyInstance<f64>;
