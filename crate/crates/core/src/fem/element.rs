use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::vec::mat3_inverse;
use crate::geom::{Mat3, Vec3};
use crate::scalar::Real;

/// Dense 12x12 element matrix indexed by `3 * corner + component`.
pub type Block12<T> = [[T; 12]; 12];

/// Isotropic linear elastic material.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub young: f64,
    pub poisson: f64,
    pub density: f64,
}

impl Default for Material {
    fn default() -> Self {
        Self {
            young: 1.0,
            poisson: 0.3,
            density: 1.0,
        }
    }
}

impl Material {
    pub fn validate(&self) -> Result<()> {
        if !(self.young > 0.0) {
            return Err(Error::Precondition(format!(
                "Young's modulus must be positive, got {}",
                self.young
            )));
        }
        if !(0.0..0.5).contains(&self.poisson) {
            return Err(Error::Precondition(format!(
                "Poisson ratio must lie in [0, 0.5), got {}",
                self.poisson
            )));
        }
        if !(self.density > 0.0) {
            return Err(Error::Precondition(format!(
                "density must be positive, got {}",
                self.density
            )));
        }
        Ok(())
    }

    /// Lame parameters `(lambda, mu)`.
    pub fn lame(&self) -> (f64, f64) {
        let (e, nu) = (self.young, self.poisson);
        (e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu)))
    }
}

/// Consistent mass matrix of a linear tet: `rho V (1 + delta_ab) / 20` per component.
pub fn element_mass<T: Real>(volume: T, density: T) -> Block12<T> {
    let mut m = [[T::zero(); 12]; 12];
    let base = density * volume / T::lit(20.0);
    for a in 0..4 {
        for b in 0..4 {
            let v = if a == b { base + base } else { base };
            for d in 0..3 {
                m[3 * a + d][3 * b + d] = v;
            }
        }
    }
    m
}

/// Gradients of the four barycentric shape functions and the tet volume.
pub fn shape_gradients<T: Real>(x: [Vec3<T>; 4]) -> Option<([Vec3<T>; 4], T)> {
    let e = [x[1] - x[0], x[2] - x[0], x[3] - x[0]];
    // Rows of D are the edge vectors, so the columns of D^-1 are the gradients of lambda_1..3.
    let d: Mat3<T> = [e[0].to_array(), e[1].to_array(), e[2].to_array()];
    let inv = mat3_inverse(&d)?;
    let g1 = Vec3::new(inv[0][0], inv[1][0], inv[2][0]);
    let g2 = Vec3::new(inv[0][1], inv[1][1], inv[2][1]);
    let g3 = Vec3::new(inv[0][2], inv[1][2], inv[2][2]);
    let vol = e[0].dot(e[1].cross(e[2])) / T::lit(6.0);
    Some(([-(g1 + g2 + g3), g1, g2, g3], vol))
}

/// Small-strain stiffness matrix of a linear tet, the Hessian of
/// `V (mu |eps|^2 + lambda/2 tr(eps)^2)`.
pub fn element_stiffness<T: Real>(x: [Vec3<T>; 4], material: &Material) -> Block12<T> {
    let (g, vol) = shape_gradients(x).expect("non-degenerate tet");
    let (lambda, mu) = material.lame();
    let (lambda, mu) = (T::lit(lambda), T::lit(mu));
    let mut k = [[T::zero(); 12]; 12];
    for a in 0..4 {
        for b in 0..4 {
            let gab = g[a].dot(g[b]);
            for i in 0..3 {
                for j in 0..3 {
                    let mut v = lambda * g[a][i] * g[b][j] + mu * g[a][j] * g[b][i];
                    if i == j {
                        v += mu * gab;
                    }
                    k[3 * a + i][3 * b + j] = vol * v;
                }
            }
        }
    }
    k
}

pub(crate) fn block_apply<T: Real>(b: &Block12<T>, x: &[T], y: &mut [T]) {
    for (row, yi) in b.iter().zip(y.iter_mut()) {
        *yi = row.iter().zip(x).map(|(&a, &v)| a * v).sum();
    }
}

pub(crate) fn block_quad<T: Real>(b: &Block12<T>, x: &[T]) -> T {
    b.iter()
        .zip(x)
        .map(|(row, &xi)| xi * row.iter().zip(x).map(|(&a, &v)| a * v).sum::<T>())
        .sum()
}
