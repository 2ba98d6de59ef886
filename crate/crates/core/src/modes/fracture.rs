//! Fracture modes: unit-mass corner fields minimizing elastic energy plus the
//! weighted discontinuity energy, computed one at a time by deflation.
//!
//! Candidate fault sets come from sweep cuts of smooth low-energy rigid fields
//! (or from every partition on tiny meshes); each candidate partition is solved
//! exactly for its best piecewise rigid field, which becomes the mode.

use nalgebra::{Matrix6, Vector6};

use super::partition::{CandidateSet, PartitionSolver, PieceSolution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::rigid::RigidSpace;
use super::SolverConfig;
use crate::error::{Error, Result};
use crate::fem::discrete::rigid_corner_fields;
use crate::fem::{CornerField, DiscreteOperators};
use crate::geom::TetMesh;
use crate::linalg::{axpy, dot, lobpcg, norm, scale};
use crate::scalar::Real;
use crate::unionfind::UnionFind;

/// The modes `U` (M-orthonormal, ordered by objective) with their fault data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FractureModes<T> {
    pub modes: Vec<CornerField<T>>,
    pub objectives: Vec<T>,
    /// Per mode: `(face, jump norm)` for every face whose jump exceeds `eps_fault`.
    pub faults: Vec<Vec<(usize, T)>>,
    pub eps_fault: T,
    /// Whether the reweighting iterations met the tolerance.
    pub converged: Vec<bool>,
    /// Whether the mode was snapped to a piecewise rigid field.
    pub snapped: Vec<bool>,
    /// Best objective after each reweighting step, per mode (before snapping).
    pub histories: Vec<Vec<T>>,
}

impl<T: Real> FractureModes<T> {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
}

/// Faces whose jump in each mode exceeds `eps_fault`.
pub fn mode_fault_faces<T: Real>(
    ops: &DiscreteOperators<T>,
    modes: &FractureModes<T>,
    eps_fault: T,
) -> Vec<Vec<usize>> {
    modes
        .modes
        .iter()
        .map(|u| (0..ops.faces()).filter(|&f| ops.jump_norm(f, u) > eps_fault).collect())
        .collect()
}

fn is_connected<T: Real>(ops: &DiscreteOperators<T>) -> bool {
    let mut uf = UnionFind::new(ops.m());
    for f in &ops.adjacency.faces {
        uf.union(f.tets[0], f.tets[1]);
    }
    uf.component_sizes().len() == 1
}

/// Meshes with at most this many tets have every set partition of their tets evaluated.
const EXHAUSTIVE_TETS: usize = 6;
/// Sweep thresholds per principal direction.
const SWEEP_CUTS: usize = 24;
/// Candidates refined with the full iteration budget after screening.
const REFINED: usize = 3;
const SCREEN_ITERS: usize = 20;
const REFINE_ITERS: usize = 300;

/// Computes `cfg.k` fracture modes of the mesh.
pub fn fracture_modes<T: Real>(
    mesh: &TetMesh<T>,
    ops: &DiscreteOperators<T>,
    cfg: &SolverConfig,
) -> Result<FractureModes<T>> {
    cfg.validate()?;
    if ops.m() != mesh.m() {
        return Err(Error::Precondition("operators belong to a different mesh".into()));
    }
    let available = (6 * mesh.m()).saturating_sub(6);
    if cfg.k > available {
        return Err(Error::Dimension {
            requested: cfg.k,
            available,
        });
    }
    if !is_connected(ops) {
        return Err(Error::Precondition("fracture modes need a face-connected mesh".into()));
    }
    let space = RigidSpace::new(mesh, ops);
    let mut solver = PartitionSolver::new(mesh, ops);
    let omega = T::lit(cfg.omega);
    let eps_fault = T::lit(cfg.eps_fault);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let length = mesh.bbox().extent().norm().to_f64_lossy() * 0.5;

    // M-orthonormal corner fields every new mode must be orthogonal to.
    let mut basis: Vec<(Vec<T>, Vec<T>)> = Vec::new();
    for r in rigid_corner_fields(mesh) {
        if let Some(q) = m_orthonormalize(ops, r.0, &basis) {
            basis.push(q);
        }
    }
    let exhaustive = (mesh.m() <= EXHAUSTIVE_TETS).then(|| all_partitions(&solver, mesh.m()));
    let mut used_partitions: Vec<(Vec<usize>, usize)> = Vec::new();

    let mut modes = Vec::with_capacity(cfg.k);
    let mut histories = Vec::with_capacity(cfg.k);
    let mut converged = Vec::with_capacity(cfg.k);
    let mut snapped = Vec::with_capacity(cfg.k);
    for r in 0..cfg.k {
        let fields: Vec<&[T]> = basis.iter().map(|(q, _)| q.as_slice()).collect();
        solver.set_constraints(&fields);

        let mut candidates = CandidateSet::default();
        for (labels, pieces) in &used_partitions {
            candidates.insert(labels.clone(), *pieces);
        }
        let mut fallback = None;
        match &exhaustive {
            Some(all) => {
                for (labels, pieces) in all {
                    candidates.insert(labels.clone(), *pieces);
                }
            }
            None => {
                let constraints = rigid_constraints(&space, ops, &basis);
                let project = |v: &mut [T]| {
                    for _ in 0..2 {
                        for q in &constraints {
                            let c = dot(q, v);
                            axpy(-c, q, v);
                        }
                    }
                };
                for _ in 0..cfg.restarts {
                    let mut c0: Vec<T> = (0..space.dim())
                        .map(|_| T::lit(StandardNormal.sample(&mut rng)))
                        .collect();
                    project(&mut c0);
                    let n0 = norm(&c0);
                    scale(T::one() / n0, &mut c0);
                    for c in smooth_fields(&space, &project, c0, cfg) {
                        let u = space.to_corners(&c);
                        sweep_candidates(&solver, &solver.tet_motions(&u), length, &mut candidates);
                        fallback.get_or_insert(u);
                    }
                }
            }
        }

        // Screen every candidate cheaply, then refine the most promising ones.
        let mut history: Vec<T> = Vec::new();
        let mut best_so_far = f64::INFINITY;
        let mut screened: Vec<(f64, usize)> = Vec::new();
        for (i, (labels, pieces)) in candidates.list.iter().enumerate() {
            if let Some(sol) = solver.solve(labels, *pieces, SCREEN_ITERS) {
                screened.push((sol.energy, i));
                best_so_far = best_so_far.min(sol.energy);
                history.push(omega * T::lit(best_so_far));
            }
        }
        screened.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut best: Option<(f64, usize, PieceSolution)> = None;
        for &(_, i) in screened.iter().take(REFINED) {
            let (labels, pieces) = &candidates.list[i];
            if let Some(sol) = solver.solve(labels, *pieces, REFINE_ITERS) {
                if best.as_ref().is_none_or(|b| sol.energy < b.0) {
                    best = Some((sol.energy, i, sol));
                }
            }
        }

        let (u, did_snap, ok) = match best {
            Some((energy, i, sol)) => {
                best_so_far = best_so_far.min(energy);
                history.push(omega * T::lit(best_so_far));
                let labels = &candidates.list[i].0;
                used_partitions.push(candidates.list[i].clone());
                (solver.field(labels, &sol.coeffs), true, sol.converged)
            }
            None => match fallback {
                Some(u) => (u, false, false),
                None => return Err(Error::NonConvergence(format!("mode {r}: no admissible partition"))),
            },
        };
        let q = m_orthonormalize(ops, u, &basis)
            .ok_or_else(|| Error::NonConvergence(format!("mode {r} collapsed onto earlier modes")))?;
        log::debug!(
            "mode {r}: {} candidates, objective {:.6e}, snapped {did_snap}",
            candidates.list.len(),
            history.last().map_or(0.0, |h| h.to_f64_lossy())
        );
        modes.push(CornerField(q.0.clone()));
        basis.push(q);
        histories.push(history);
        converged.push(ok);
        snapped.push(did_snap);
    }

    let objectives: Vec<T> = modes.iter().map(|u| ops.objective(u, omega)).collect();
    let mut order: Vec<usize> = (0..modes.len()).collect();
    order.sort_by(|&a, &b| objectives[a].partial_cmp(&objectives[b]).unwrap().then(a.cmp(&b)));
    fn pick<X: Copy>(order: &[usize], v: &[X]) -> Vec<X> {
        order.iter().map(|&i| v[i]).collect()
    }
    let modes: Vec<CornerField<T>> = order.iter().map(|&i| modes[i].clone()).collect();
    let histories: Vec<Vec<T>> = order.iter().map(|&i| histories[i].clone()).collect();
    let faults = modes
        .iter()
        .map(|u| {
            (0..ops.faces())
                .filter_map(|f| {
                    let j = ops.jump_norm(f, u);
                    (j > eps_fault).then_some((f, j))
                })
                .collect()
        })
        .collect();
    Ok(FractureModes {
        objectives: pick(&order, &objectives),
        converged: pick(&order, &converged),
        snapped: pick(&order, &snapped),
        modes,
        faults,
        eps_fault,
        histories,
    })
}

/// Every set partition of the tets, split into face-connected pieces.
fn all_partitions<T: Real>(solver: &PartitionSolver<'_, T>, m: usize) -> Vec<(Vec<usize>, usize)> {
    let mut out = CandidateSet::default();
    // Restricted growth strings enumerate set partitions once each.
    let mut a = vec![0usize; m];
    loop {
        let (labels, pieces) = solver.pieces(&a);
        out.insert(labels, pieces);
        let mut i = m;
        loop {
            if i <= 1 {
                return out.list;
            }
            i -= 1;
            let max_prev = a[..i].iter().copied().max().unwrap_or(0);
            if a[i] <= max_prev {
                a[i] += 1;
                a[i + 1..].iter_mut().for_each(|v| *v = 0);
                break;
            }
        }
    }
}

/// Sweep cuts along the two principal directions of the per-tet rigid motions.
fn sweep_candidates<T: Real>(
    solver: &PartitionSolver<'_, T>,
    motions: &[Vector6<f64>],
    length: f64,
    out: &mut CandidateSet,
) {
    let m = motions.len();
    let scaled: Vec<Vector6<f64>> = motions
        .iter()
        .map(|a| Vector6::new(a[0], a[1], a[2], a[3] * length, a[4] * length, a[5] * length))
        .collect();
    let mean = scaled.iter().fold(Vector6::zeros(), |s, a| s + a) / m as f64;
    let mut cov = Matrix6::<f64>::zeros();
    for a in &scaled {
        let d = a - mean;
        cov += d * d.transpose();
    }
    let (_, dirs) = crate::linalg::sym_eigen(6, cov.transpose().as_slice());
    for dir in dirs.iter().rev().take(2) {
        let dir = Vector6::from_column_slice(dir);
        let mut scores: Vec<(f64, usize)> = scaled
            .iter()
            .enumerate()
            .map(|(t, a)| ((a - mean).dot(&dir), t))
            .collect();
        scores.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let cuts = SWEEP_CUTS.min(m - 1);
        for q in 1..=cuts {
            let split = q * m / (cuts + 1);
            if split == 0 || split >= m {
                continue;
            }
            let mut side = vec![0usize; m];
            for &(_, t) in &scores[split..] {
                side[t] = 1;
            }
            let (labels, pieces) = solver.pieces(&side);
            out.insert(labels, pieces);
        }
    }
}

/// M-orthogonalizes `u` against `basis` (twice) and normalizes; returns `(q, M q)`.
fn m_orthonormalize<T: Real>(
    ops: &DiscreteOperators<T>,
    mut u: Vec<T>,
    basis: &[(Vec<T>, Vec<T>)],
) -> Option<(Vec<T>, Vec<T>)> {
    let n0 = ops.m_norm_squared(&u).sqrt();
    if !(n0 > T::zero()) {
        return None;
    }
    for _ in 0..2 {
        for (q, mq) in basis {
            let c = dot(mq, &u);
            axpy(-c, q, &mut u);
        }
    }
    let n = ops.m_norm_squared(&u).sqrt();
    if !(n > T::lit(1e-8) * n0) {
        return None;
    }
    scale(T::one() / n, &mut u);
    let mu = ops.mass_mul(&u);
    Some((u, mu))
}

/// Euclidean-orthonormal rigid-coordinate images of the constraint fields.
fn rigid_constraints<T: Real>(
    space: &RigidSpace<T>,
    ops: &DiscreteOperators<T>,
    basis: &[(Vec<T>, Vec<T>)],
) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::with_capacity(basis.len());
    for (q, _) in basis {
        let mut c = space.project_corners(ops, q);
        let n0 = norm(&c);
        for _ in 0..2 {
            for v in &out {
                let d = dot(v, &c);
                axpy(-d, v, &mut c);
            }
        }
        let n = norm(&c);
        if n > T::lit(1e-10) * n0 {
            scale(T::one() / n, &mut c);
            out.push(c);
        }
    }
    out
}

/// Low-energy fields of the rigid jump operator: the smallest eigenvector with
/// area weights, followed by reweighted steps that concentrate the jumps.
/// Returns a snapshot after each doubling of the step count.
fn smooth_fields<T: Real>(
    space: &RigidSpace<T>,
    project: &dyn Fn(&mut [T]),
    c0: Vec<T>,
    cfg: &SolverConfig,
) -> Vec<Vec<T>> {
    let nf = space.faces();
    let mut w: Vec<T> = (0..nf).map(|f| space.sqrt_area(f)).collect();
    let mut c = c0;
    let mut out = Vec::new();
    let mut eps = T::zero();
    for step in 0..=cfg.max_iters {
        let rayleigh: T = (0..nf)
            .map(|f| {
                let j = space.jump_norm(f, &c);
                w[f] * j * j
            })
            .sum();
        let pre = space.block_jacobi(&w);
        let res = lobpcg(
            |x: &[T], y: &mut [T]| space.weighted_apply(&w, x, y),
            None,
            |r: &[T], z: &mut [T]| {
                for (t, blk) in pre.iter().enumerate() {
                    let rv = Vector6::from_fn(|i, _| r[6 * t + i].to_f64_lossy());
                    let zv: Vector6<f64> = blk * rv;
                    for i in 0..6 {
                        z[6 * t + i] = T::lit(zv[i]);
                    }
                }
            },
            project,
            vec![c.clone()],
            if step == 0 {
                10 * cfg.inner_iters
            } else {
                cfg.inner_iters
            },
            rayleigh * T::lit(1e-6),
        );
        c = res.vectors.into_iter().next().expect("one vector");
        if step.is_power_of_two() || step == 0 {
            out.push(c.clone());
        }
        let jumps: Vec<T> = (0..nf).map(|f| space.jump_norm(f, &c)).collect();
        if step == 0 {
            eps = jumps.iter().copied().fold(T::zero(), T::max);
        }
        eps *= T::lit(0.5);
        for f in 0..nf {
            w[f] = space.sqrt_area(f) / jumps[f].max(eps).max(T::min_positive_value());
        }
    }
    out
}
