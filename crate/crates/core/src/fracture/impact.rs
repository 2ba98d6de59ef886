use rand::Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::{Deserialize, Serialize};

use super::generate::ImpactConfig;
use crate::fem::{CornerField, DiscreteOperators};
use crate::geom::{TetMesh, Vec3};
use crate::linalg::{axpy, dot};
use crate::modes::FractureModes;
use crate::scalar::Real;

/// Where and how a shape was hit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImpactSample {
    pub vertex: usize,
    pub point: [f64; 3],
    pub direction: [f64; 3],
    pub magnitude: f64,
}

/// Draws an impact at a uniformly chosen boundary vertex with a uniform direction and
/// log-uniform magnitude; the field decays as a Gaussian of the corner distance.
pub fn sample_impact<T: Real, R: Rng + ?Sized>(
    mesh: &TetMesh<T>,
    boundary_vertices: &[usize],
    rng: &mut R,
    cfg: &ImpactConfig,
) -> (CornerField<T>, ImpactSample) {
    assert!(!boundary_vertices.is_empty(), "mesh has no boundary vertices");
    let vertex = boundary_vertices[rng.random_range(0..boundary_vertices.len())];
    let direction: [f64; 3] = UnitSphere.sample(rng);
    let (lo, hi) = cfg.magnitude_range;
    let magnitude = if lo > 0.0 && hi > lo {
        (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
    } else {
        lo + rng.random::<f64>() * (hi - lo)
    };
    let sample = ImpactSample {
        vertex,
        point: mesh.vertices[vertex].to_array().map(|c| c.to_f64_lossy()),
        direction,
        magnitude,
    };
    (impact_field(mesh, &sample, cfg.falloff_sigma), sample)
}

/// `w(x) = magnitude * direction * exp(-|x - p|^2 / (2 sigma^2))` at every corner.
pub fn impact_field<T: Real>(mesh: &TetMesh<T>, s: &ImpactSample, sigma: f64) -> CornerField<T> {
    let p = Vec3::from_array(s.point.map(T::lit));
    let d = Vec3::from_array(s.direction.map(T::lit)) * T::lit(s.magnitude);
    let inv = if sigma.is_finite() {
        T::lit(1.0 / (2.0 * sigma * sigma))
    } else {
        T::zero()
    };
    let mut w = CornerField::zeros(mesh.m());
    for (t, tet) in mesh.tets.iter().enumerate() {
        for (c, &v) in tet.iter().enumerate() {
            let r2 = (mesh.vertices[v] - p).norm_squared();
            w.set_corner(t, c, d * (-(r2 * inv)).exp());
        }
    }
    w
}

/// `w* = U U^T M w`
pub fn project_impact<T: Real>(modes: &FractureModes<T>, ops: &DiscreteOperators<T>, w: &[T]) -> CornerField<T> {
    let mw = ops.mass_mul(w);
    let mut out = vec![T::zero(); w.len()];
    for u in &modes.modes {
        axpy(dot(u, &mw), u, &mut out);
    }
    CornerField(out)
}
