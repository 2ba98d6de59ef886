#![allow(dead_code)]

use std::path::{Path, PathBuf};

use bbx_core::geom::{primitives, write_obj};
use bbx_core::{SurfaceMesh, Vec3};
use bbx_pipeline::PipelineConfig;

pub fn cube() -> SurfaceMesh {
    primitives::cube(Vec3::zero(), 1.0)
}

pub fn sphere() -> SurfaceMesh {
    primitives::icosphere(3, 0.5)
}

/// Writes `mesh` to `dir/category/name.obj` and returns the path.
pub fn write_shape(dir: &Path, category: &str, name: &str, mesh: &SurfaceMesh) -> PathBuf {
    let d = dir.join(category);
    std::fs::create_dir_all(&d).unwrap();
    let p = d.join(format!("{name}.obj"));
    write_obj(mesh, &p).unwrap();
    p
}

/// Desk-scale settings: 32-cell distance grid, defaults elsewhere.
pub fn desk_config(inputs: Vec<String>, output: PathBuf) -> PipelineConfig {
    PipelineConfig {
        inputs,
        output,
        grid_n: 32,
        cage_res: 16,
        workers: Some(1),
        ..PipelineConfig::default()
    }
}

/// Smallest settings that still yield the full 20 + 80 patterns.
pub fn tiny_config(inputs: Vec<String>, output: PathBuf) -> PipelineConfig {
    PipelineConfig {
        grid_n: 16,
        cage_res: 8,
        tet_res: 2,
        ..desk_config(inputs, output)
    }
}
