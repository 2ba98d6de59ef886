//! Small closed meshes used by tests, examples and the CLI demo inputs.

use std::collections::HashMap;

use super::mesh::{SurfaceMesh, TetMesh};
use super::vec::Vec3;
use crate::scalar::Real;

/// Axis-aligned box with outward-oriented triangles.
pub fn box_mesh<T: Real>(center: Vec3<T>, extents: Vec3<T>) -> SurfaceMesh<T> {
    let h = extents * T::lit(0.5);
    let mut vertices = Vec::with_capacity(8);
    for i in 0..8 {
        let pick = |bit: usize, k: usize| if i >> bit & 1 == 1 { h[k] } else { -h[k] };
        vertices.push(center + Vec3::new(pick(0, 0), pick(1, 1), pick(2, 2)));
    }
    // Corner index = x | y<<1 | z<<2.
    let quads = [
        [0, 2, 3, 1], // -z
        [4, 5, 7, 6], // +z
        [0, 1, 5, 4], // -y
        [2, 6, 7, 3], // +y
        [0, 4, 6, 2], // -x
        [1, 3, 7, 5], // +x
    ];
    let faces = quads
        .iter()
        .flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]])
        .collect();
    SurfaceMesh::new(vertices, faces)
}

pub fn cube<T: Real>(center: Vec3<T>, side: T) -> SurfaceMesh<T> {
    box_mesh(center, Vec3::splat(side))
}

/// Subdivided icosahedron projected onto a sphere of `radius` centered at the origin.
pub fn icosphere<T: Real>(subdivisions: usize, radius: T) -> SurfaceMesh<T> {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut verts: Vec<[f64; 3]> = raw
        .iter()
        .map(|v| {
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            [v[0] / n, v[1] / n, v[2] / n]
        })
        .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                let m = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0, (p[2] + q[2]) / 2.0];
                let n = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
                verts.push([m[0] / n, m[1] / n, m[2] / n]);
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let r = radius.to_f64_lossy();
    let vertices = verts
        .into_iter()
        .map(|v| Vec3::new(T::lit(v[0] * r), T::lit(v[1] * r), T::lit(v[2] * r)))
        .collect();
    SurfaceMesh::new(vertices, faces)
}

/// Concatenates surfaces without merging vertices.
pub fn merge<T: Real>(meshes: &[SurfaceMesh<T>]) -> SurfaceMesh<T> {
    let mut out = SurfaceMesh::default();
    for m in meshes {
        let off = out.vertices.len();
        out.vertices.extend_from_slice(&m.vertices);
        out.faces
            .extend(m.faces.iter().map(|f| [f[0] + off, f[1] + off, f[2] + off]));
    }
    out
}

/// Two tets glued on the face `{1, 2, 3}`.
pub fn two_tets<T: Real>() -> TetMesh<T> {
    let v = |x: f64, y: f64, z: f64| Vec3::new(T::lit(x), T::lit(y), T::lit(z));
    TetMesh::new(
        vec![
            v(0.0, 0.0, 0.0),
            v(1.0, 0.0, 0.0),
            v(0.0, 1.0, 0.0),
            v(0.0, 0.0, 1.0),
            v(1.0, 1.0, 1.0),
        ],
        vec![[0, 1, 2, 3], [4, 1, 3, 2]],
    )
}

/// Unit cube `[0,1]^3` split into one central and four corner tets.
pub fn cube_five_tets<T: Real>() -> TetMesh<T> {
    let mut vertices = Vec::with_capacity(8);
    for i in 0..8usize {
        vertices.push(Vec3::new(
            T::of_usize(i & 1),
            T::of_usize(i >> 1 & 1),
            T::of_usize(i >> 2 & 1),
        ));
    }
    let mut m = TetMesh::new(
        vertices,
        super::voxel_tets::five_tet_split(0, [0, 1, 2, 3, 4, 5, 6, 7]).to_vec(),
    );
    m.fix_orientation();
    m
}

/// Tet mesh of a block of `nx * ny * nz` unit cells with the alternating 5-tet split.
pub fn tet_block<T: Real>(nx: usize, ny: usize, nz: usize, cell: T) -> TetMesh<T> {
    let cells: Vec<[usize; 3]> = (0..nz)
        .flat_map(|k| (0..ny).flat_map(move |j| (0..nx).map(move |i| [i, j, k])))
        .collect();
    super::voxel_tets::tets_from_cells(&cells, Vec3::zero(), cell)
}
