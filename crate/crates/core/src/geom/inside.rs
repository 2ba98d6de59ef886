//! Inside/outside classification by crossing parity along axis-aligned lines.
//!
//! Hits exactly on shared edges or vertices are resolved with an ownership rule
//! evaluated on canonically ordered edges, so a watertight surface is crossed an
//! even number of times by every line regardless of degeneracies.

use super::mesh::SurfaceMesh;
use super::vec::Vec3;
use crate::scalar::Real;

#[inline]
fn orient<T: Real>(a: (T, T), b: (T, T), c: (T, T)) -> T {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Edge function with the endpoints in lexicographic order, negated if swapped,
/// so both triangles sharing an edge evaluate bit-identical magnitudes.
#[inline]
fn edge_fn<T: Real>(p: (T, T), q: (T, T), x: (T, T)) -> T {
    if (p.0, p.1) <= (q.0, q.1) {
        orient(p, q, x)
    } else {
        -orient(q, p, x)
    }
}

#[inline]
fn owns<T: Real>(p: (T, T), q: (T, T)) -> bool {
    let dy = q.1 - p.1;
    let dx = q.0 - p.0;
    dy > T::zero() || (dy == T::zero() && dx < T::zero())
}

/// Coordinate along `axis` where the line through `(u, v)` in the other two axes
/// crosses the triangle, if it does.
pub fn axis_line_hit<T: Real>(tri: &[Vec3<T>; 3], axis: usize, u: T, v: T) -> Option<T> {
    let (a1, a2) = ((axis + 1) % 3, (axis + 2) % 3);
    let p2 = |p: &Vec3<T>| (p[a1], p[a2]);
    let mut pts = [p2(&tri[0]), p2(&tri[1]), p2(&tri[2])];
    let mut depth = [tri[0][axis], tri[1][axis], tri[2][axis]];
    let area = orient(pts[0], pts[1], pts[2]);
    if area == T::zero() {
        return None;
    }
    if area < T::zero() {
        pts.swap(1, 2);
        depth.swap(1, 2);
    }
    let x = (u, v);
    let mut w = [T::zero(); 3];
    for i in 0..3 {
        // Weight of vertex i comes from the opposite edge.
        let (p, q) = (pts[(i + 1) % 3], pts[(i + 2) % 3]);
        let e = edge_fn(p, q, x);
        if e < T::zero() || (e == T::zero() && !owns(p, q)) {
            return None;
        }
        w[i] = e;
    }
    let sum = w[0] + w[1] + w[2];
    if !(sum > T::zero()) {
        return None;
    }
    Some((w[0] * depth[0] + w[1] * depth[1] + w[2] * depth[2]) / sum)
}

/// Parity vote over the +x, +y and +z rays from `p`.
pub fn point_in_mesh<T: Real>(mesh: &SurfaceMesh<T>, p: Vec3<T>) -> bool {
    let mut votes = 0;
    for axis in 0..3 {
        let (a1, a2) = ((axis + 1) % 3, (axis + 2) % 3);
        let mut crossings = 0usize;
        for f in 0..mesh.faces.len() {
            let tri = mesh.triangle(f);
            if let Some(d) = axis_line_hit(&tri, axis, p[a1], p[a2]) {
                if d > p[axis] {
                    crossings += 1;
                }
            }
        }
        votes += crossings % 2;
    }
    votes >= 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::primitives;

    #[test]
    fn cube_inside_outside() {
        let cube = primitives::cube::<f64>(Vec3::zero(), 1.0);
        assert!(point_in_mesh(&cube, Vec3::new(0.1, 0.2, -0.3)));
        assert!(!point_in_mesh(&cube, Vec3::new(0.6, 0.0, 0.0)));
        // Rays through the face diagonals and through cube vertices.
        assert!(point_in_mesh(&cube, Vec3::new(0.0, 0.0, 0.0)));
        assert!(point_in_mesh(&cube, Vec3::new(0.25, 0.25, 0.25)));
        assert!(!point_in_mesh(&cube, Vec3::new(-0.7, 0.5, 0.5)));
    }

    #[test]
    fn every_line_crosses_closed_surface_evenly() {
        let s = primitives::icosphere::<f64>(1, 1.0);
        for i in 0..40 {
            for j in 0..40 {
                let (u, v) = (-1.2 + 0.06 * i as f64, -1.2 + 0.06 * j as f64);
                for axis in 0..3 {
                    let hits = (0..s.faces.len())
                        .filter(|&f| axis_line_hit(&s.triangle(f), axis, u, v).is_some())
                        .count();
                    assert_eq!(hits % 2, 0, "u={u} v={v} axis={axis}");
                }
            }
        }
    }
}
