//! Voxel tetrahedralization: every selected grid cell becomes five tets.

use std::collections::BTreeMap;

use super::mesh::TetMesh;
use super::sdf::ScalarGrid;
use super::vec::Vec3;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Five-tet split of a cell whose corner `c = x | y<<1 | z<<2` maps to `ids[c]`.
/// Even and odd cells use mirrored splits so that face diagonals of neighbors agree.
/// Orientation is not fixed here.
pub fn five_tet_split(parity: usize, ids: [usize; 8]) -> [[usize; 4]; 5] {
    let local: [[usize; 4]; 5] = if parity.is_multiple_of(2) {
        [[0, 3, 5, 6], [1, 0, 3, 5], [2, 0, 3, 6], [4, 0, 5, 6], [7, 3, 5, 6]]
    } else {
        [[1, 2, 4, 7], [0, 1, 2, 4], [3, 1, 2, 7], [5, 1, 4, 7], [6, 2, 4, 7]]
    };
    local.map(|t| t.map(|c| ids[c]))
}

/// Tet mesh of the given integer cells (`[i, j, k]`) on a lattice with spacing `h`.
/// Vertices are numbered by ascending lattice index, tets in cell order.
pub fn tets_from_cells<T: Real>(cells: &[[usize; 3]], origin: Vec3<T>, h: T) -> TetMesh<T> {
    let mut ids: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for c in cells {
        for corner in 0..8 {
            ids.insert(
                (c[2] + (corner >> 2 & 1), c[1] + (corner >> 1 & 1), c[0] + (corner & 1)),
                0,
            );
        }
    }
    let mut vertices = Vec::with_capacity(ids.len());
    for (n, (key, id)) in ids.iter_mut().enumerate() {
        *id = n;
        let (k, j, i) = *key;
        vertices.push(origin + Vec3::new(T::of_usize(i), T::of_usize(j), T::of_usize(k)) * h);
    }
    let mut tets = Vec::with_capacity(cells.len() * 5);
    for c in cells {
        let corner_ids: [usize; 8] = std::array::from_fn(|corner| {
            ids[&(c[2] + (corner >> 2 & 1), c[1] + (corner >> 1 & 1), c[0] + (corner & 1))]
        });
        tets.extend(five_tet_split(c[0] + c[1] + c[2], corner_ids));
    }
    let mut mesh = TetMesh::new(vertices, tets);
    mesh.fix_orientation();
    mesh
}

/// Sizes of the face-connected components of a cell set, largest first.
fn cell_components(cells: &[[usize; 3]]) -> Vec<usize> {
    let index: BTreeMap<[usize; 3], usize> = cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut uf = crate::unionfind::UnionFind::new(cells.len());
    for (i, c) in cells.iter().enumerate() {
        for axis in 0..3 {
            let mut n = *c;
            n[axis] += 1;
            if let Some(&j) = index.get(&n) {
                uf.union(i, j);
            }
        }
    }
    let mut sizes = uf.component_sizes();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// Splits every cell whose center value is below `iso_offset` into five tets.
pub fn tetrahedralize_voxels<T: Real>(grid: &ScalarGrid<T>, iso_offset: T) -> Result<TetMesh<T>> {
    let [cx, cy, cz] = grid.cell_counts();
    let mut cells = Vec::new();
    for k in 0..cz {
        for j in 0..cy {
            for i in 0..cx {
                if grid.cell_center_value(i, j, k) < iso_offset {
                    cells.push([i, j, k]);
                }
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::EmptyIsosurface(iso_offset.to_f64_lossy()));
    }
    let sizes = cell_components(&cells);
    if sizes.len() > 1 {
        return Err(Error::Disconnected {
            sizes: sizes.iter().map(|s| s * 5).collect(),
        });
    }
    let mesh = tets_from_cells(&cells, grid.origin, grid.spacing);
    mesh.validate()?;
    Ok(mesh)
}
