//! Bounding-volume hierarchy over triangles for nearest-point queries.

use super::mesh::{Aabb, SurfaceMesh};
use super::vec::Vec3;
use crate::scalar::Real;

const LEAF_SIZE: usize = 4;

enum Node<T> {
    Leaf { bounds: Aabb<T>, start: usize, end: usize },
    Inner { bounds: Aabb<T>, left: usize, right: usize },
}

impl<T: Real> Node<T> {
    fn bounds(&self) -> &Aabb<T> {
        match self {
            Node::Leaf { bounds, .. } | Node::Inner { bounds, .. } => bounds,
        }
    }
}

pub struct TriangleBvh<'a, T> {
    mesh: &'a SurfaceMesh<T>,
    order: Vec<usize>,
    nodes: Vec<Node<T>>,
}

impl<'a, T: Real> TriangleBvh<'a, T> {
    pub fn new(mesh: &'a SurfaceMesh<T>) -> Self {
        let mut order: Vec<usize> = (0..mesh.faces.len()).collect();
        let centroids: Vec<Vec3<T>> = (0..mesh.faces.len())
            .map(|f| {
                let [a, b, c] = mesh.triangle(f);
                (a + b + c) / T::lit(3.0)
            })
            .collect();
        let mut nodes = Vec::new();
        if !order.is_empty() {
            let n = order.len();
            build(mesh, &centroids, &mut order, 0, n, &mut nodes);
        }
        Self { mesh, order, nodes }
    }

    /// Squared distance from `p` to the closest point on the surface.
    pub fn distance_squared(&self, p: Vec3<T>) -> T {
        let mut best = T::infinity();
        if self.nodes.is_empty() {
            return best;
        }
        let mut stack = vec![self.nodes.len() - 1];
        while let Some(i) = stack.pop() {
            match &self.nodes[i] {
                Node::Leaf { bounds, start, end } => {
                    if bounds.distance_squared(p) >= best {
                        continue;
                    }
                    for &f in &self.order[*start..*end] {
                        let [a, b, c] = self.mesh.triangle(f);
                        let d = closest_point_on_triangle(p, a, b, c).distance_squared(p);
                        if d < best {
                            best = d;
                        }
                    }
                }
                Node::Inner { bounds, left, right } => {
                    if bounds.distance_squared(p) >= best {
                        continue;
                    }
                    let dl = self.nodes[*left].bounds().distance_squared(p);
                    let dr = self.nodes[*right].bounds().distance_squared(p);
                    // Visit the nearer child first.
                    if dl < dr {
                        stack.push(*right);
                        stack.push(*left);
                    } else {
                        stack.push(*left);
                        stack.push(*right);
                    }
                }
            }
        }
        best
    }
}

fn build<T: Real>(
    mesh: &SurfaceMesh<T>,
    centroids: &[Vec3<T>],
    order: &mut [usize],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node<T>>,
) -> usize {
    let mut bounds = Aabb::empty();
    for &f in &order[start..end] {
        for v in mesh.triangle(f) {
            bounds.grow(v);
        }
    }
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf { bounds, start, end });
        return nodes.len() - 1;
    }
    let cb = Aabb::from_points(order[start..end].iter().map(|&f| &centroids[f]));
    let e = cb.extent();
    let axis = if e.x >= e.y && e.x >= e.z {
        0
    } else if e.y >= e.z {
        1
    } else {
        2
    };
    let mid = (start + end) / 2;
    order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
        centroids[a][axis]
            .partial_cmp(&centroids[b][axis])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let left = build(mesh, centroids, order, start, mid, nodes);
    let right = build(mesh, centroids, order, mid, end, nodes);
    nodes.push(Node::Inner { bounds, left, right });
    nodes.len() - 1
}

/// Closest point on triangle `abc` to `p` (Voronoi-region walk).
pub fn closest_point_on_triangle<T: Real>(p: Vec3<T>, a: Vec3<T>, b: Vec3<T>, c: Vec3<T>) -> Vec3<T> {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    let zero = T::zero();
    if d1 <= zero && d2 <= zero {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= zero && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= zero && d1 >= zero && d3 <= zero {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= zero && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= zero && d2 >= zero && d6 <= zero {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= zero && (d4 - d3) >= zero && (d5 - d6) >= zero {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = T::one() / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::primitives;

    #[test]
    fn matches_brute_force() {
        let mesh = primitives::icosphere::<f64>(2, 1.0);
        let bvh = TriangleBvh::new(&mesh);
        for i in 0..200 {
            let t = i as f64 * 0.37;
            let p = Vec3::new(t.sin() * 1.7, (t * 1.3).cos() * 0.9, (t * 0.7).sin() * 1.2);
            let brute = (0..mesh.faces.len())
                .map(|f| {
                    let [a, b, c] = mesh.triangle(f);
                    closest_point_on_triangle(p, a, b, c).distance_squared(p)
                })
                .fold(f64::INFINITY, f64::min);
            assert_eq!(bvh.distance_squared(p), brute);
        }
    }

    #[test]
    fn closest_point_regions() {
        let (a, b, c) = (
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        );
        assert_eq!(closest_point_on_triangle(Vec3::new(-1.0, -1.0, 0.0), a, b, c), a);
        let q = closest_point_on_triangle(Vec3::new(0.2, 0.2, 5.0), a, b, c);
        assert!(q.distance_squared(Vec3::new(0.2, 0.2, 0.0)) < 1e-30);
        assert_eq!(
            closest_point_on_triangle(Vec3::new(0.5, -3.0, 1.0), a, b, c),
            Vec3::new(0.5, 0.0, 0.0)
        );
    }
}
