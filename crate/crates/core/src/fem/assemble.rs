use super::element::{element_mass, element_stiffness, Block12, Material};
use crate::error::{Error, Result};
use crate::geom::TetMesh;
use crate::linalg::CsrMatrix;
use crate::scalar::Real;

fn assemble<T: Real>(mesh: &TetMesh<T>, block: impl Fn(usize) -> Block12<T>) -> CsrMatrix<T> {
    let n3 = 3 * mesh.n();
    let mut triplets = Vec::with_capacity(144 * mesh.m());
    for (t, tet) in mesh.tets.iter().enumerate() {
        let b = block(t);
        for a in 0..4 {
            for c in 0..4 {
                for i in 0..3 {
                    for j in 0..3 {
                        triplets.push((3 * tet[a] + i, 3 * tet[c] + j, b[3 * a + i][3 * c + j]));
                    }
                }
            }
        }
    }
    CsrMatrix::from_triplets(n3, n3, triplets)
}

fn check_volumes<T: Real>(mesh: &TetMesh<T>) -> Result<()> {
    match (0..mesh.m()).find(|&t| !(mesh.tet_volume(t) > T::zero())) {
        Some(t) => Err(Error::InvalidMesh(format!("tet {t} has non-positive volume"))),
        None => Ok(()),
    }
}

/// Consistent mass matrix, `3n x 3n`, interleaved `3 * vertex + component`.
pub fn assemble_mass<T: Real>(mesh: &TetMesh<T>, density: f64) -> Result<CsrMatrix<T>> {
    if !(density > 0.0) {
        return Err(Error::Precondition(format!("density must be positive, got {density}")));
    }
    check_volumes(mesh)?;
    let rho = T::lit(density);
    Ok(assemble(mesh, |t| element_mass(mesh.tet_volume(t), rho)))
}

/// Linear elasticity stiffness matrix, `3n x 3n`.
pub fn assemble_stiffness<T: Real>(mesh: &TetMesh<T>, material: &Material) -> Result<CsrMatrix<T>> {
    material.validate()?;
    check_volumes(mesh)?;
    Ok(assemble(mesh, |t| element_stiffness(mesh.corners(t), material)))
}

/// Copies a vertex field (length `3n`) onto tet corners (length `12m`).
pub fn lift_field<T: Real>(mesh: &TetMesh<T>, field: &[T]) -> super::CornerField<T> {
    assert_eq!(field.len(), 3 * mesh.n());
    let mut out = Vec::with_capacity(12 * mesh.m());
    for tet in &mesh.tets {
        for &v in tet {
            out.extend_from_slice(&field[3 * v..3 * v + 3]);
        }
    }
    super::CornerField(out)
}

/// The six infinitesimal rigid motions sampled at the vertices:
/// three translations then rotations about x, y, z through `center`.
pub fn rigid_vertex_fields<T: Real>(mesh: &TetMesh<T>, center: crate::geom::Vec3<T>) -> Vec<Vec<T>> {
    (0..6)
        .map(|r| {
            mesh.vertices
                .iter()
                .flat_map(|&p| crate::fem::discrete::rigid_motion_at(r, p - center).to_array())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::primitives;

    #[test]
    fn mass_preserves_volume_per_axis() {
        let mesh = primitives::cube_five_tets::<f64>();
        let m = assemble_mass(&mesh, 2.0).unwrap();
        for d in 0..3 {
            let ones: Vec<f64> = (0..3 * mesh.n()).map(|i| if i % 3 == d { 1.0 } else { 0.0 }).collect();
            assert!((m.quad_form(&ones) - 2.0).abs() < 1e-14);
        }
        assert!(m.asymmetry() == 0.0);
    }

    #[test]
    fn mass_scales_with_cube_of_length() {
        let mesh = primitives::two_tets::<f64>();
        let a = assemble_mass(&mesh, 1.0).unwrap();
        let b = assemble_mass(&mesh.scaled(2.0), 1.0).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((8.0 * x - y).abs() <= 1e-14 * y.abs());
        }
    }

    #[test]
    fn stiffness_annihilates_rigid_motions() {
        let mesh = primitives::tet_block::<f64>(2, 2, 1, 0.5);
        let q = assemble_stiffness(&mesh, &Material::default()).unwrap();
        let norm = q.max_abs();
        for u in rigid_vertex_fields(&mesh, crate::geom::Vec3::new(0.3, -0.2, 0.1)) {
            let qu = q.mul_vec(&u);
            let worst = qu.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(worst <= 1e-9 * norm, "{worst}");
        }
        assert!(q.asymmetry() < 1e-12);
    }

    #[test]
    fn incompressible_rejected() {
        let mesh = primitives::two_tets::<f64>();
        let mat = Material {
            poisson: 0.5,
            ..Default::default()
        };
        assert!(assemble_stiffness(&mesh, &mat).is_err());
    }
}
