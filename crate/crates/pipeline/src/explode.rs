use bbx_core::geom::{extract_piece_surfaces_with, obj_string_grouped, FaceAdjacency, SurfaceMesh, TetMesh, Vec3};

use crate::error::Result;

/// Pieces of a pattern moved away from the assembly centroid by `spacing` times their
/// centroid offset, as one OBJ with a `piece_i` group per piece.
pub fn explode_view_export(
    mesh: &TetMesh<f64>,
    adj: &FaceAdjacency<f64>,
    labels: &[usize],
    spacing: f64,
) -> Result<String> {
    let pieces = exploded_pieces(mesh, adj, labels, spacing)?;
    let groups: Vec<(String, SurfaceMesh<f64>)> = pieces
        .into_iter()
        .enumerate()
        .map(|(i, s)| (format!("piece_{i}"), s))
        .collect();
    Ok(obj_string_grouped(&groups))
}

pub fn exploded_pieces(
    mesh: &TetMesh<f64>,
    adj: &FaceAdjacency<f64>,
    labels: &[usize],
    spacing: f64,
) -> Result<Vec<SurfaceMesh<f64>>> {
    let pieces = extract_piece_surfaces_with(mesh, adj, labels)?;
    let centroids: Vec<Vec3<f64>> = pieces.iter().map(|s| s.volume_centroid()).collect();
    let volumes: Vec<f64> = pieces.iter().map(|s| s.signed_volume()).collect();
    let total: f64 = volumes.iter().sum();
    let mut center = Vec3::zero();
    for (c, v) in centroids.iter().zip(&volumes) {
        center += *c * (v / total);
    }
    Ok(pieces
        .iter()
        .zip(&centroids)
        .map(|(s, &c)| {
            let shift = (c - center) * spacing;
            s.map_vertices(|v| v + shift)
        })
        .collect())
}
