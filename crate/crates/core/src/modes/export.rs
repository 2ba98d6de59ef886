use crate::error::Result;
use crate::fem::CornerField;
use crate::geom::{obj_string_grouped, piece_surfaces_with_origins, FaceAdjacency, SurfaceMesh, TetMesh, Vec3};
use crate::scalar::Real;
use crate::unionfind::UnionFind;

/// Pieces of `mode` (split at faces with jump above `eps_fault`), each displaced by
/// `amplitude` times the mean corner displacement of its vertices.
pub fn displaced_mode_mesh<T: Real>(
    mesh: &TetMesh<T>,
    adjacency: &FaceAdjacency<T>,
    mode: &CornerField<T>,
    eps_fault: T,
    amplitude: T,
) -> Result<Vec<SurfaceMesh<T>>> {
    let mut uf = UnionFind::new(mesh.m());
    for face in &adjacency.faces {
        let [a, b] = face.tets;
        let jump: T = (0..3)
            .map(|j| {
                (mode.corner(a, face.corners[0][j] as usize) - mode.corner(b, face.corners[1][j] as usize))
                    .norm_squared()
            })
            .sum::<T>()
            .sqrt();
        if jump <= eps_fault {
            uf.union(a, b);
        }
    }
    let (labels, count) = uf.labels();
    let pieces = piece_surfaces_with_origins(mesh, adjacency, &labels)?;
    let mut out = Vec::with_capacity(count);
    for (label, (mut piece, originals)) in pieces.into_iter().enumerate() {
        // Mean displacement of each original vertex over this piece's corners.
        let mut sum = vec![(Vec3::zero(), 0usize); mesh.n()];
        for (t, tet) in mesh.tets.iter().enumerate() {
            if labels[t] == label {
                for (c, &v) in tet.iter().enumerate() {
                    sum[v].0 += mode.corner(t, c);
                    sum[v].1 += 1;
                }
            }
        }
        for (pv, &v) in piece.vertices.iter_mut().zip(&originals) {
            *pv += sum[v].0 / T::of_usize(sum[v].1) * amplitude;
        }
        out.push(piece);
    }
    Ok(out)
}

/// Grouped OBJ text of [`displaced_mode_mesh`], one group per piece.
pub fn mode_obj<T: Real>(
    mesh: &TetMesh<T>,
    adjacency: &FaceAdjacency<T>,
    mode: &CornerField<T>,
    eps_fault: T,
    amplitude: T,
) -> Result<String> {
    let pieces = displaced_mode_mesh(mesh, adjacency, mode, eps_fault, amplitude)?;
    let groups: Vec<(String, SurfaceMesh<T>)> = pieces
        .into_iter()
        .enumerate()
        .map(|(i, p)| (format!("piece_{i}"), p))
        .collect();
    Ok(obj_string_grouped(&groups))
}
