//! Meshes, normalization, signed distance grids, cages, tetrahedralization and pieces.

pub mod adjacency;
pub mod bvh;
pub mod inside;
pub mod isosurface;
pub mod mesh;
pub mod normalize;
pub mod obj;
pub mod pieces;
pub mod primitives;
pub mod sdf;
pub mod tetio;
pub mod vec;
pub mod voxel_tets;

pub use adjacency::{tet_adjacency, FaceAdjacency, InteriorFace};
pub use inside::point_in_mesh;
pub use isosurface::{extract_cage, isosurface};
pub use mesh::{Aabb, SurfaceMesh, TetMesh, TET_FACES};
pub use normalize::{normalize_to_unit_box, UnitBoxTransform};
pub use obj::{load_surface_mesh, obj_string, obj_string_grouped, parse_obj, write_obj};
pub use pieces::{extract_piece_surfaces, extract_piece_surfaces_with, piece_surfaces_with_origins};
pub use sdf::{voxelize_sdf, ScalarGrid};
pub use tetio::load_tet_mesh;
pub use vec::{Mat3, Vec3};
pub use voxel_tets::tetrahedralize_voxels;
