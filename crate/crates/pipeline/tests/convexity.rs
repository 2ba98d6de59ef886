use bbx_core::geom::primitives;
use bbx_core::{SurfaceMesh, Vec3};
use bbx_pipeline::convexity_rank;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tet() -> SurfaceMesh {
    SurfaceMesh::new(
        vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        ],
        vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]],
    )
}

/// Two unit boxes joined by a thin bar along x.
fn dumbbell() -> SurfaceMesh {
    let lobe = |x: f64| primitives::box_mesh(Vec3::new(x, 0.0, 0.0), Vec3::new(1.0, 1.0, 1.0));
    let left = lobe(-1.5);
    let right = lobe(1.5);
    let bar = primitives::box_mesh(Vec3::zero(), Vec3::new(2.0, 0.1, 0.1));
    // Three closed shells touching face to face.
    primitives::merge(&[left, bar, right])
}

fn rank(mesh: &SurfaceMesh, seed: u64, n: usize) -> f64 {
    convexity_rank(mesh, &mut ChaCha8Rng::seed_from_u64(seed), n).unwrap()
}

#[test]
fn convex_pieces_have_minimal_rank() {
    assert_eq!(rank(&tet(), 1, 100), 1.0 / 100.0);
    let cube = primitives::cube(Vec3::zero(), 2.0);
    assert_eq!(rank(&cube, 2, 150), 1.0 / 150.0);
}

#[test]
fn concave_piece_ranks_higher() {
    let lobe = primitives::box_mesh(Vec3::zero(), Vec3::new(1.0, 1.0, 1.0));
    let single = rank(&lobe, 3, 200);
    let two = rank(&dumbbell(), 3, 200);
    assert!(two > single, "{two} vs {single}");
}

#[test]
fn deterministic_and_validated() {
    let d = dumbbell();
    assert_eq!(rank(&d, 9, 120), rank(&d, 9, 120));
    let mut open = tet();
    open.faces.pop();
    assert!(convexity_rank(&open, &mut ChaCha8Rng::seed_from_u64(0), 100).is_err());
    assert!(convexity_rank(&tet(), &mut ChaCha8Rng::seed_from_u64(0), 1).is_err());
}
