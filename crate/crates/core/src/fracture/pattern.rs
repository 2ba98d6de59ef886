use serde::{Deserialize, Serialize};

use super::impact::ImpactSample;
use crate::fem::DiscreteOperators;
use crate::scalar::Real;
use crate::unionfind::UnionFind;

/// Where a pattern came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Thresholded directly from a field.
    Field,
    Mode {
        mode: usize,
    },
    Impact {
        #[serde(flatten)]
        impact: ImpactSample,
        /// Seed of the shape's generation stream.
        seed: u64,
        /// Attempts spent on this pattern, including the accepted one.
        attempts: usize,
    },
}

/// A labeling of the tets into face-connected pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FracturePattern {
    pub labels: Vec<usize>,
    pub piece_count: usize,
    pub tau: f64,
    pub provenance: Provenance,
}

impl FracturePattern {
    pub fn piece_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.piece_count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

/// Breaks every face whose jump norm exceeds `tau` and labels the remaining
/// connected components in order of their smallest tet.
pub fn extract_pattern<T: Real>(ops: &DiscreteOperators<T>, field: &[T], tau: f64) -> FracturePattern {
    let tau_t = T::lit(tau);
    let mut uf = UnionFind::new(ops.m());
    for (f, face) in ops.adjacency.faces.iter().enumerate() {
        if !(ops.jump_norm(f, field) > tau_t) {
            uf.union(face.tets[0], face.tets[1]);
        }
    }
    let (labels, piece_count) = uf.labels();
    FracturePattern {
        labels,
        piece_count,
        tau,
        provenance: Provenance::Field,
    }
}
