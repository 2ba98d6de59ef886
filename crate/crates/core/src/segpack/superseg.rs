use serde::{Deserialize, Serialize};

use crate::fem::DiscreteOperators;
use crate::modes::FractureModes;
use crate::scalar::Real;
use crate::unionfind::UnionFind;

/// The finest partition induced by the union of all mode faults.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperSegmentation {
    pub atomic_labels: Vec<usize>,
    pub atomic_count: usize,
    /// Sorted interior face ids broken by at least one mode.
    pub broken_face_union: Vec<usize>,
}

impl SuperSegmentation {
    /// Components of the tets after removing `broken_face_union`.
    pub fn from_broken_face_union<T: Real>(ops: &DiscreteOperators<T>, mut broken_face_union: Vec<usize>) -> Self {
        broken_face_union.sort_unstable();
        broken_face_union.dedup();
        let mut broken = vec![false; ops.faces()];
        for &f in &broken_face_union {
            broken[f] = true;
        }
        let mut uf = UnionFind::new(ops.m());
        for (f, face) in ops.adjacency.faces.iter().enumerate() {
            if !broken[f] {
                uf.union(face.tets[0], face.tets[1]);
            }
        }
        let (atomic_labels, atomic_count) = uf.labels();
        Self {
            atomic_labels,
            atomic_count,
            broken_face_union,
        }
    }

    /// Piece id of each atomic piece under `labels`, or the first atomic piece split by it.
    pub fn mapping(&self, labels: &[usize]) -> Result<Vec<usize>, usize> {
        let mut image = vec![usize::MAX; self.atomic_count];
        for (&a, &l) in self.atomic_labels.iter().zip(labels) {
            if image[a] == usize::MAX {
                image[a] = l;
            } else if image[a] != l {
                return Err(a);
            }
        }
        Ok(image)
    }

    /// Per-tet labels obtained by composing the atomic labels with `mapping`.
    pub fn compose(&self, mapping: &[usize]) -> Vec<usize> {
        self.atomic_labels.iter().map(|&a| mapping[a]).collect()
    }
}

/// Atomic pieces: components left after removing every face with a jump above
/// `eps_fault` in any mode.
pub fn super_segmentation<T: Real>(
    ops: &DiscreteOperators<T>,
    modes: &FractureModes<T>,
    eps_fault: T,
) -> SuperSegmentation {
    let broken = (0..ops.faces())
        .filter(|&f| modes.modes.iter().any(|u| ops.jump_norm(f, u) > eps_fault))
        .collect();
    SuperSegmentation::from_broken_face_union(ops, broken)
}
