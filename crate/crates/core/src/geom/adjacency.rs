use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::mesh::{TetMesh, TET_FACES};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A triangle shared by exactly two tets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteriorFace {
    /// Incident tets, ascending.
    pub tets: [usize; 2],
    /// Global vertex ids of the face, ascending.
    pub vertices: [usize; 3],
    /// `corners[s][j]`: local corner (0..4) of `vertices[j]` inside `tets[s]`.
    pub corners: [[u8; 3]; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceAdjacency<T> {
    /// Interior faces ordered by their sorted vertex triple.
    pub faces: Vec<InteriorFace>,
    pub areas: Vec<T>,
    /// Interior face id behind each local face of each tet, `None` on the boundary.
    pub tet_faces: Vec<[Option<usize>; 4]>,
    pub boundary_count: usize,
}

impl<T: Real> FaceAdjacency<T> {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Neighbor across local face `lf` of tet `t`.
    pub fn neighbor(&self, t: usize, lf: usize) -> Option<(usize, usize)> {
        self.tet_faces[t][lf].map(|f| {
            let [a, b] = self.faces[f].tets;
            (f, if a == t { b } else { a })
        })
    }
}

/// Builds the interior-face table of a tet mesh.
pub fn tet_adjacency<T: Real>(mesh: &TetMesh<T>) -> Result<FaceAdjacency<T>> {
    let mut incident: HashMap<[usize; 3], Vec<(usize, usize)>> = HashMap::with_capacity(mesh.m() * 3);
    for (t, tet) in mesh.tets.iter().enumerate() {
        for (lf, f) in TET_FACES.iter().enumerate() {
            let mut key = f.map(|c| tet[c]);
            key.sort_unstable();
            incident.entry(key).or_default().push((t, lf));
        }
    }
    let mut keys: Vec<[usize; 3]> = incident.keys().copied().collect();
    keys.sort_unstable();
    let mut faces = Vec::new();
    let mut areas = Vec::new();
    let mut tet_faces = vec![[None; 4]; mesh.m()];
    let mut boundary_count = 0;
    for key in keys {
        let inc = &incident[&key];
        match inc.len() {
            1 => boundary_count += 1,
            2 => {
                let (mut a, mut b) = (inc[0], inc[1]);
                if a.0 > b.0 {
                    std::mem::swap(&mut a, &mut b);
                }
                let local =
                    |t: usize| -> [u8; 3] { key.map(|v| mesh.tets[t].iter().position(|&x| x == v).unwrap() as u8) };
                let id = faces.len();
                faces.push(InteriorFace {
                    tets: [a.0, b.0],
                    vertices: key,
                    corners: [local(a.0), local(b.0)],
                });
                let [p, q, r] = key.map(|v| mesh.vertices[v]);
                areas.push((q - p).cross(r - p).norm() * T::lit(0.5));
                tet_faces[a.0][a.1] = Some(id);
                tet_faces[b.0][b.1] = Some(id);
            }
            count => return Err(Error::NonManifold { vertices: key, count }),
        }
    }
    Ok(FaceAdjacency {
        faces,
        areas,
        tet_faces,
        boundary_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::primitives;

    #[test]
    fn two_tets_share_one_face() {
        let m = primitives::two_tets::<f64>();
        let adj = tet_adjacency(&m).unwrap();
        assert_eq!(adj.len(), 1);
        let f = adj.faces[0];
        assert_eq!(f.vertices, [1, 2, 3]);
        for s in 0..2 {
            for j in 0..3 {
                assert_eq!(m.tets[f.tets[s]][f.corners[s][j] as usize], f.vertices[j]);
            }
        }
        assert!((adj.areas[0] - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(adj.boundary_count, 6);
    }

    #[test]
    fn single_tet_has_no_interior_faces() {
        let m = TetMesh::new(primitives::two_tets::<f64>().vertices[..4].to_vec(), vec![[0, 1, 2, 3]]);
        assert!(tet_adjacency(&m).unwrap().is_empty());
    }

    #[test]
    fn non_manifold_face_rejected() {
        let mut m = primitives::two_tets::<f64>();
        m.vertices.push(crate::geom::Vec3::new(0.5, 0.5, 2.0));
        m.tets.push([5, 1, 2, 3]);
        m.fix_orientation();
        assert!(matches!(tet_adjacency(&m), Err(Error::NonManifold { count: 3, .. })));
    }

    #[test]
    fn face_count_identity_on_block() {
        let m = primitives::tet_block::<f64>(3, 2, 2, 1.0);
        let adj = tet_adjacency(&m).unwrap();
        assert_eq!(4 * m.m(), 2 * adj.len() + adj.boundary_count);
    }
}
