use super::adjacency::{tet_adjacency, FaceAdjacency};
use super::mesh::{SurfaceMesh, TetMesh, TET_FACES};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::unionfind::UnionFind;

/// Boundary surface of each label class of a tet mesh, indexed by label.
pub fn extract_piece_surfaces<T: Real>(mesh: &TetMesh<T>, labels: &[usize]) -> Result<Vec<SurfaceMesh<T>>> {
    let adj = tet_adjacency(mesh)?;
    extract_piece_surfaces_with(mesh, &adj, labels)
}

pub fn extract_piece_surfaces_with<T: Real>(
    mesh: &TetMesh<T>,
    adj: &FaceAdjacency<T>,
    labels: &[usize],
) -> Result<Vec<SurfaceMesh<T>>> {
    Ok(piece_surfaces_with_origins(mesh, adj, labels)?
        .into_iter()
        .map(|(s, _)| s)
        .collect())
}

/// Like [`extract_piece_surfaces_with`], also returning each piece's original vertex ids.
pub fn piece_surfaces_with_origins<T: Real>(
    mesh: &TetMesh<T>,
    adj: &FaceAdjacency<T>,
    labels: &[usize],
) -> Result<Vec<(SurfaceMesh<T>, Vec<usize>)>> {
    if labels.len() != mesh.m() {
        return Err(Error::Precondition(format!(
            "{} labels for {} tets",
            labels.len(),
            mesh.m()
        )));
    }
    let count = labels.iter().max().map_or(0, |&l| l + 1);
    let mut uf = UnionFind::new(mesh.m());
    for f in &adj.faces {
        let [a, b] = f.tets;
        if labels[a] == labels[b] {
            uf.union(a, b);
        }
    }
    let mut root = vec![usize::MAX; count];
    for (t, &l) in labels.iter().enumerate() {
        let r = uf.find(t);
        if root[l] == usize::MAX {
            root[l] = r;
        } else if root[l] != r {
            return Err(Error::DisconnectedLabel { label: l });
        }
    }
    if let Some(label) = root.iter().position(|&r| r == usize::MAX) {
        return Err(Error::DisconnectedLabel { label });
    }

    let mut faces: Vec<Vec<[usize; 3]>> = vec![Vec::new(); count];
    for (t, tet) in mesh.tets.iter().enumerate() {
        for (lf, local) in TET_FACES.iter().enumerate() {
            let open = match adj.neighbor(t, lf) {
                None => true,
                Some((_, n)) => labels[n] != labels[t],
            };
            if open {
                faces[labels[t]].push(local.map(|c| tet[c]));
            }
        }
    }
    let mut remap = vec![usize::MAX; mesh.n()];
    Ok(faces
        .into_iter()
        .map(|piece_faces| {
            let mut used: Vec<usize> = piece_faces.iter().flatten().copied().collect();
            used.sort_unstable();
            used.dedup();
            for (i, &v) in used.iter().enumerate() {
                remap[v] = i;
            }
            let surface = SurfaceMesh::new(
                used.iter().map(|&v| mesh.vertices[v]).collect(),
                piece_faces.iter().map(|f| f.map(|v| remap[v])).collect(),
            );
            (surface, used)
        })
        .collect())
}
