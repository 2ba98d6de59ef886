//! Closed isosurface extraction (marching tetrahedra over a Kuhn split of each cell).

use std::collections::HashMap;

use super::mesh::SurfaceMesh;
use super::sdf::ScalarGrid;
use super::vec::Vec3;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Six tets sharing the main diagonal 0-7 of a cell (corner = x | y<<1 | z<<2).
/// The split is translation invariant, so neighboring cells agree on face diagonals.
const KUHN: [[usize; 4]; 6] = [
    [0, 1, 3, 7],
    [0, 1, 5, 7],
    [0, 2, 3, 7],
    [0, 2, 6, 7],
    [0, 4, 5, 7],
    [0, 4, 6, 7],
];

/// Edge interpolation parameters are kept away from the endpoints so no output
/// triangle collapses onto a grid node.
const T_CLAMP: f64 = 1e-4;

/// Surface at `value == level`, oriented with normals pointing toward larger values.
/// Grid boundary nodes count as outside, so the result is always closed.
pub fn isosurface<T: Real>(grid: &ScalarGrid<T>, level: T) -> Result<SurfaceMesh<T>> {
    let [nx, ny, nz] = grid.resolution;
    let (vmin, vmax) = grid
        .values
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(a, b), &v| (a.min(v), b.max(v)));
    if !(level > vmin && level < vmax) {
        return Err(Error::EmptyIsosurface(level.to_f64_lossy()));
    }
    let inside = |i: usize, j: usize, k: usize| !grid.is_boundary_node(i, j, k) && grid.value(i, j, k) < level;
    let mut vertex_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut vertices: Vec<Vec3<T>> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let lo = T::lit(T_CLAMP);
    let hi = T::one() - lo;

    for k in 0..nz - 1 {
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let corner = |c: usize| (i + (c & 1), j + (c >> 1 & 1), k + (c >> 2 & 1));
                let ins: [bool; 8] = std::array::from_fn(|c| {
                    let (a, b, d) = corner(c);
                    inside(a, b, d)
                });
                if ins.iter().all(|&x| x) || ins.iter().all(|&x| !x) {
                    continue;
                }
                for tet in KUHN {
                    let inn: Vec<usize> = tet.iter().copied().filter(|&c| ins[c]).collect();
                    let out: Vec<usize> = tet.iter().copied().filter(|&c| !ins[c]).collect();
                    if inn.is_empty() || out.is_empty() {
                        continue;
                    }
                    let mut edge_vertex = |a: usize, b: usize| -> usize {
                        let (ai, aj, ak) = corner(a);
                        let (bi, bj, bk) = corner(b);
                        let ia = grid.index(ai, aj, ak);
                        let ib = grid.index(bi, bj, bk);
                        let key = (ia.min(ib), ia.max(ib));
                        *vertex_of.entry(key).or_insert_with(|| {
                            // Interpolate from the inside node toward the outside node.
                            let (va, vb) = (grid.values[ia], grid.values[ib]);
                            let mut t = if vb != va {
                                (level - va) / (vb - va)
                            } else {
                                T::lit(0.5)
                            };
                            if !(t >= lo) {
                                t = lo;
                            }
                            if t > hi {
                                t = hi;
                            }
                            let pa = grid.node(ai, aj, ak);
                            let pb = grid.node(bi, bj, bk);
                            vertices.push(pa + (pb - pa) * t);
                            vertices.len() - 1
                        })
                    };
                    let pts = |c: usize| {
                        let (a, b, d) = corner(c);
                        grid.node(a, b, d)
                    };
                    let mut tris: Vec<[usize; 3]> = Vec::new();
                    match (inn.len(), out.len()) {
                        (1, 3) => {
                            let a = inn[0];
                            tris.push([edge_vertex(a, out[0]), edge_vertex(a, out[1]), edge_vertex(a, out[2])]);
                        }
                        (3, 1) => {
                            let b = out[0];
                            tris.push([edge_vertex(inn[0], b), edge_vertex(inn[1], b), edge_vertex(inn[2], b)]);
                        }
                        (2, 2) => {
                            let (a0, a1, b0, b1) = (inn[0], inn[1], out[0], out[1]);
                            let q = [
                                edge_vertex(a0, b0),
                                edge_vertex(a0, b1),
                                edge_vertex(a1, b1),
                                edge_vertex(a1, b0),
                            ];
                            tris.push([q[0], q[1], q[2]]);
                            tris.push([q[0], q[2], q[3]]);
                        }
                        _ => unreachable!(),
                    }
                    let inside_mean = inn.iter().fold(Vec3::zero(), |s, &c| s + pts(c)) / T::of_usize(inn.len());
                    let outside_mean = out.iter().fold(Vec3::zero(), |s, &c| s + pts(c)) / T::of_usize(out.len());
                    let dir = outside_mean - inside_mean;
                    for mut f in tris {
                        let [a, b, c] = f.map(|v| vertices[v]);
                        if (b - a).cross(c - a).dot(dir) < T::zero() {
                            f.swap(1, 2);
                        }
                        faces.push(f);
                    }
                }
            }
        }
    }
    if faces.is_empty() {
        return Err(Error::EmptyIsosurface(level.to_f64_lossy()));
    }
    Ok(SurfaceMesh::new(vertices, faces))
}

/// Cage surface: the isosurface at `+iso_offset`, which strictly contains the
/// zero level set whenever `iso_offset` is at least one grid spacing.
pub fn extract_cage<T: Real>(grid: &ScalarGrid<T>, iso_offset: T) -> Result<SurfaceMesh<T>> {
    if iso_offset < grid.spacing {
        return Err(Error::Precondition(format!(
            "iso offset {} is below the grid spacing {}",
            iso_offset, grid.spacing
        )));
    }
    isosurface(grid, iso_offset)
}
