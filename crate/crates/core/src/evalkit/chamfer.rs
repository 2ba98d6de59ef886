use serde::{Deserialize, Serialize};

use crate::geom::{Aabb, Vec3};
use crate::scalar::Real;

/// Normalization of the two nearest-neighbor sums.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChamferNorm {
    #[default]
    Sum,
    /// Each sum divided by its cloud size.
    Mean,
}

/// Uniform grid over a point set for nearest-neighbor queries.
struct Grid<'a, T> {
    points: &'a [Vec3<T>],
    min: Vec3<T>,
    cell: T,
    dims: [usize; 3],
    starts: Vec<usize>,
    order: Vec<usize>,
}

impl<'a, T: Real> Grid<'a, T> {
    fn new(points: &'a [Vec3<T>]) -> Self {
        let bb = Aabb::from_points(points);
        let extent = bb.extent();
        let per_axis = (points.len() as f64 / 2.0).cbrt().max(1.0);
        let mut cell = extent.max_component() / T::lit(per_axis);
        if !(cell > T::zero()) {
            cell = T::one();
        }
        let dims = [0, 1, 2].map(|a| ((extent[a] / cell).to_f64_lossy().floor() as usize + 1).min(1 << 10));
        let mut grid = Self {
            points,
            min: bb.min,
            cell,
            dims,
            starts: Vec::new(),
            order: Vec::new(),
        };
        let n_cells = dims[0] * dims[1] * dims[2];
        let keys: Vec<usize> = points.iter().map(|&p| grid.flat(grid.cell_of(p))).collect();
        let mut counts = vec![0usize; n_cells + 1];
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for i in 0..n_cells {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut order = vec![0; points.len()];
        for (i, &k) in keys.iter().enumerate() {
            order[fill[k]] = i;
            fill[k] += 1;
        }
        grid.starts = counts;
        grid.order = order;
        grid
    }

    fn cell_of(&self, p: Vec3<T>) -> [usize; 3] {
        [0, 1, 2].map(|a| {
            let x = ((p[a] - self.min[a]) / self.cell).to_f64_lossy().floor();
            if x.is_nan() || x < 0.0 {
                0
            } else {
                (x as usize).min(self.dims[a] - 1)
            }
        })
    }

    fn flat(&self, c: [usize; 3]) -> usize {
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    fn nearest_sq(&self, q: Vec3<T>) -> T {
        let c = self.cell_of(q);
        let mut best = T::infinity();
        let max_ring = *self.dims.iter().max().unwrap();
        for r in 0..=max_ring {
            let lo = c.map(|x| x.saturating_sub(r));
            let hi = [0, 1, 2].map(|a| (c[a] + r).min(self.dims[a] - 1));
            for z in lo[2]..=hi[2] {
                for y in lo[1]..=hi[1] {
                    for x in lo[0]..=hi[0] {
                        let ring = x.abs_diff(c[0]).max(y.abs_diff(c[1])).max(z.abs_diff(c[2]));
                        if ring != r {
                            continue;
                        }
                        let k = self.flat([x, y, z]);
                        for &i in &self.order[self.starts[k]..self.starts[k + 1]] {
                            let d = q.distance_squared(self.points[i]);
                            if d < best {
                                best = d;
                            }
                        }
                    }
                }
            }
            let reach = self.cell * T::of_usize(r);
            if best <= reach * reach {
                break;
            }
        }
        best
    }
}

fn directed<T: Real>(from: &[Vec3<T>], to: &[Vec3<T>]) -> T {
    let grid = Grid::new(to);
    from.iter().map(|&p| grid.nearest_sq(p)).sum()
}

/// `Σ_{x∈P} min_y ‖x−y‖² + Σ_{y∈Q} min_x ‖y−x‖²`.
pub fn chamfer_distance<T: Real>(p: &[Vec3<T>], q: &[Vec3<T>]) -> T {
    chamfer_distance_with(p, q, ChamferNorm::Sum)
}

pub fn chamfer_distance_with<T: Real>(p: &[Vec3<T>], q: &[Vec3<T>], norm: ChamferNorm) -> T {
    assert!(!p.is_empty() && !q.is_empty(), "chamfer distance of an empty cloud");
    let (a, b) = (directed(p, q), directed(q, p));
    match norm {
        ChamferNorm::Sum => a + b,
        ChamferNorm::Mean => a / T::of_usize(p.len()) + b / T::of_usize(q.len()),
    }
}

/// Quadratic-time reference implementation.
pub fn chamfer_distance_brute<T: Real>(p: &[Vec3<T>], q: &[Vec3<T>]) -> T {
    let nn = |x: Vec3<T>, set: &[Vec3<T>]| set.iter().map(|&y| x.distance_squared(y)).fold(T::infinity(), T::min);
    p.iter().map(|&x| nn(x, q)).sum::<T>() + q.iter().map(|&y| nn(y, p)).sum::<T>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_clouds() {
        let p = vec![Vec3::new(0.5, 0.5, 0.5); 4];
        let q = vec![Vec3::new(0.5, 0.5, 1.5)];
        assert_eq!(chamfer_distance(&p, &q), 5.0);
        assert_eq!(chamfer_distance_with(&p, &q, ChamferNorm::Mean), 2.0);
    }

    #[test]
    fn query_far_outside_the_grid() {
        let q: Vec<Vec3<f64>> = (0..100)
            .map(|i| Vec3::new(i as f64 * 0.01, 0.0, (i % 7) as f64 * 0.1))
            .collect();
        let p = vec![Vec3::new(-3.0, 2.0, 9.0), Vec3::new(0.3, -5.0, 0.2)];
        assert_eq!(chamfer_distance(&p, &q), chamfer_distance_brute(&p, &q));
    }
}
