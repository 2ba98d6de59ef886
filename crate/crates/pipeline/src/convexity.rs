use bbx_core::geom::{SurfaceMesh, Vec3};
use bbx_core::linalg::numerical_rank;
use bbx_core::Error;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::Result;

pub const DEFAULT_SAMPLES: usize = 300;

fn segment_hits(p: Vec3<f64>, q: Vec3<f64>, tri: &[Vec3<f64>; 3]) -> bool {
    let d = q - p;
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let h = d.cross(e2);
    let det = e1.dot(h);
    if det.abs() < 1e-300 {
        return false;
    }
    let s = p - tri[0];
    let u = s.dot(h) / det;
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let qv = s.cross(e1);
    let v = d.dot(qv) / det;
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    let t = e2.dot(qv) / det;
    t > 0.0 && t < 1.0
}

/// Normalized numerical rank of the mutual-visibility matrix of `n_samples` surface
/// points, a weak-convexity proxy: `1/n` for convex pieces, larger for concave ones.
///
/// Samples are pushed slightly inside along the inward face normal; two samples see
/// each other when the segment between them crosses no surface triangle.
pub fn convexity_rank<R: Rng + ?Sized>(piece: &SurfaceMesh<f64>, rng: &mut R, n_samples: usize) -> Result<f64> {
    if n_samples < 2 {
        return Err(Error::Precondition("convexity rank needs at least 2 samples".into()).into());
    }
    if !piece.is_closed() {
        return Err(Error::OpenSurface("convexity rank needs a closed piece".into()).into());
    }
    let areas: Vec<f64> = (0..piece.faces.len()).map(|f| piece.face_area(f)).collect();
    let faces = WeightedIndex::new(&areas).map_err(|_| Error::ZeroArea)?;
    let orientation = piece.signed_volume().signum();
    let bb = piece.bbox();
    let push = 1e-7 * bb.extent().norm();
    let tris: Vec<[Vec3<f64>; 3]> = (0..piece.faces.len()).map(|f| piece.triangle(f)).collect();
    let boxes: Vec<(Vec3<f64>, Vec3<f64>)> = tris
        .iter()
        .map(|t| (t[0].min(t[1]).min(t[2]), t[0].max(t[1]).max(t[2])))
        .collect();

    let points: Vec<Vec3<f64>> = (0..n_samples)
        .map(|_| {
            let f = faces.sample(rng);
            let [a, b, c] = tris[f];
            let (r1, r2): (f64, f64) = (rng.random(), rng.random());
            let s = r1.sqrt();
            let p = a * (1.0 - s) + b * (s * (1.0 - r2)) + c * (s * r2);
            let inward = (b - a).cross(c - a).normalized().unwrap_or(Vec3::zero()) * -orientation;
            p + inward * push
        })
        .collect();

    let n = n_samples;
    let mut vis = vec![0.0; n * n];
    for i in 0..n {
        vis[i * n + i] = 1.0;
        for j in i + 1..n {
            let (p, q) = (points[i], points[j]);
            let (lo, hi) = (p.min(q), p.max(q));
            let blocked = tris
                .iter()
                .zip(&boxes)
                .any(|(t, (bmin, bmax))| (0..3).all(|k| bmax[k] >= lo[k] && bmin[k] <= hi[k]) && segment_hits(p, q, t));
            if !blocked {
                vis[i * n + j] = 1.0;
                vis[j * n + i] = 1.0;
            }
        }
    }
    Ok(numerical_rank(n, n, &vis, 1e-9) as f64 / n as f64)
}
