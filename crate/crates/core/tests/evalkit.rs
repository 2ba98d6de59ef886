mod common;

use bbx_core::evalkit::*;
use bbx_core::geom::primitives;
use bbx_core::geom::vec::{mat3_det, mat3_mul, mat3_transpose, Mat3};
use bbx_core::{AssemblyInstance, Pose, SurfaceMesh, Vec3};
use common::rng;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, PI};

fn cloud(n: usize, seed: u64, scale: f64) -> Vec<Vec3> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            Vec3::new(
                r.random_range(-scale..scale),
                r.random_range(-scale..scale),
                r.random_range(-scale..scale),
            )
        })
        .collect()
}

fn rz(a: f64) -> Mat3<f64> {
    rotation_from_euler([0.0, 0.0, a], EulerConvention::IntrinsicXyz)
}

fn pose(r: Mat3<f64>, t: [f64; 3]) -> Pose {
    Pose::new(r, Vec3::from_array(t)).unwrap()
}

fn instance(pieces: Vec<Vec<Vec3>>, gt: Vec<Pose>, pred: Vec<Pose>) -> AssemblyInstance {
    let pieces = pieces.into_iter().map(|p| PointCloud::new(p).unwrap()).collect();
    AssemblyInstance::new(pieces, gt, Some(pred)).unwrap()
}

fn random_instance(seed: u64, n: usize) -> AssemblyInstance {
    let mut r = rng(seed);
    let pieces: Vec<_> = (0..n).map(|i| cloud(20, seed * 31 + i as u64, 0.3)).collect();
    let mut poses = || -> Vec<Pose> {
        (0..n)
            .map(|_| {
                pose(
                    random_rotation(&mut r),
                    [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), 0.0],
                )
            })
            .collect()
    };
    let gt = poses();
    let pred = poses();
    instance(pieces, gt, pred)
}

#[test]
fn triangle_samples_lie_inside() {
    let tri = SurfaceMesh::new(
        vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ],
        vec![[0, 1, 2]],
    );
    let c = sample_point_cloud(&tri, 3, &mut rng(1)).unwrap();
    assert_eq!(c.len(), 3);
    for p in &c.points {
        assert_eq!(p.z, 0.0);
        assert!(p.x >= 0.0 && p.y >= 0.0 && p.x / 2.0 + p.y <= 1.0 + 1e-15);
    }
    assert_eq!(DEFAULT_POINTS, 1000);
}

#[test]
fn cube_faces_are_sampled_by_area() {
    let cube = primitives::cube(Vec3::zero(), 1.0);
    let c = sample_point_cloud(&cube, 6000, &mut rng(2)).unwrap();
    let mut counts = [0usize; 6];
    for p in &c.points {
        let a = p.to_array();
        let axis = (0..3).max_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs())).unwrap();
        assert!((a[axis].abs() - 0.5).abs() < 1e-12);
        counts[2 * axis + usize::from(a[axis] > 0.0)] += 1;
    }
    for c in counts {
        assert!((950..=1050).contains(&c), "{counts:?}");
    }
}

#[test]
fn sampling_errors_and_determinism() {
    let flat = SurfaceMesh::new(vec![Vec3::zero(); 3], vec![[0, 1, 2]]);
    assert!(sample_point_cloud(&flat, 5, &mut rng(0)).is_err());
    let cube = primitives::cube(Vec3::zero(), 1.0);
    assert!(sample_point_cloud(&cube, 0, &mut rng(0)).is_err());
    assert_eq!(
        sample_point_cloud(&cube, 50, &mut rng(9)).unwrap(),
        sample_point_cloud(&cube, 50, &mut rng(9)).unwrap()
    );
    assert!(PointCloud::new(Vec::<Vec3>::new()).is_err());
    assert!(PointCloud::new(vec![Vec3::new(f64::NAN, 0.0, 0.0)]).is_err());
}

#[test]
fn canonicalization_inverts_exactly() {
    let pts = PointCloud::new(
        cloud(200, 3, 2.0)
            .into_iter()
            .map(|p| p + Vec3::new(5.0, -1.0, 2.0))
            .collect(),
    )
    .unwrap();
    let (canon, gt) = canonicalize_piece(&pts, &mut rng(4));
    let c = canon.centroid();
    assert!(c.norm() < 1e-12);
    for (a, b) in gt.apply_cloud(&canon).points.iter().zip(&pts.points) {
        assert!((*a - *b).norm() < 1e-12);
    }
    let (_, again) = canonicalize_piece(&pts, &mut rng(4));
    assert_eq!(gt, again);
}

#[test]
fn random_rotations_are_proper() {
    let mut r = rng(5);
    for _ in 0..100 {
        let m: Mat3<f64> = random_rotation(&mut r);
        assert!(Pose::new(m, Vec3::zero()).is_ok());
        assert!((mat3_det(&m) - 1.0).abs() < 1e-12);
    }
    let reflect = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];
    assert!(Pose::new(reflect, Vec3::zero()).is_err());
    assert!(Pose::new([[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], Vec3::zero()).is_err());
}

#[test]
fn euler_round_trip_both_conventions() {
    let mut r = rng(6);
    for conv in [EulerConvention::IntrinsicXyz, EulerConvention::ExtrinsicXyz] {
        for _ in 0..200 {
            let a = [
                r.random_range(-PI..PI),
                r.random_range(-1.5..1.5),
                r.random_range(-PI..PI),
            ];
            let back = euler_angles(&rotation_from_euler(a, conv), conv);
            for i in 0..3 {
                assert!((a[i] - back[i]).abs() < 1e-9, "{conv:?} {a:?} {back:?}");
            }
        }
        // Gimbal lock: still reproduces the rotation.
        let m = rotation_from_euler([0.3, FRAC_PI_2, -0.4], conv);
        let back = rotation_from_euler(euler_angles(&m, conv), conv);
        for i in 0..3 {
            for j in 0..3 {
                assert!((m[i][j] - back[i][j]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn chamfer_examples() {
    let p = cloud(30, 7, 1.0);
    assert_eq!(chamfer_distance(&p, &p), 0.0);
    let a = [Vec3::new(0.0, 0.0, 0.0)];
    let b = [Vec3::new(1.0, 0.0, 0.0)];
    assert_eq!(chamfer_distance(&a, &b), 2.0);
    let q = cloud(40, 8, 1.0);
    let sum = chamfer_distance_with(&p, &q, ChamferNorm::Sum);
    let mean = chamfer_distance_with(&p, &q, ChamferNorm::Mean);
    let (mut pq, mut qp) = (0.0, 0.0);
    for x in &p {
        pq += q.iter().map(|y| x.distance_squared(*y)).fold(f64::INFINITY, f64::min);
    }
    for y in &q {
        qp += p.iter().map(|x| y.distance_squared(*x)).fold(f64::INFINITY, f64::min);
    }
    assert!((sum - (pq + qp)).abs() < 1e-12);
    assert!((mean - (pq / 30.0 + qp / 40.0)).abs() < 1e-12);
}

#[test]
fn chamfer_matches_brute_force() {
    let mut r = rng(9);
    for i in 0..500 {
        let (n, m) = (r.random_range(1..=100), r.random_range(1..=100));
        let scale = [1e-3, 1.0, 50.0][i % 3];
        let p = cloud(n, 2 * i as u64, scale);
        let q = cloud(m, 2 * i as u64 + 1, scale);
        let (fast, slow) = (chamfer_distance(&p, &q), chamfer_distance_brute(&p, &q));
        assert!((fast - slow).abs() <= 1e-12 * slow.max(1.0), "{fast} vs {slow}");
    }
}

#[test]
fn part_accuracy_examples() {
    let pieces = vec![cloud(100, 10, 0.5), cloud(100, 11, 0.5)];
    let gt = vec![pose(rz(0.3), [0.1, 0.0, 0.0]), pose(rz(-1.0), [0.0, 0.2, 0.0])];
    let exact = instance(pieces.clone(), gt.clone(), gt.clone());
    assert_eq!(part_accuracy(&exact), 100.0);
    let shifted: Vec<_> = gt
        .iter()
        .map(|g| pose(g.r, (g.t + Vec3::new(1.0, 0.0, 0.0)).to_array()))
        .collect();
    assert_eq!(
        part_accuracy(&instance(pieces.clone(), gt.clone(), shifted.clone())),
        0.0
    );
    let half = vec![gt[0], shifted[1]];
    assert_eq!(part_accuracy(&instance(pieces, gt, half)), 50.0);
    assert_eq!(PA_THRESHOLD, 0.01);
}

#[test]
fn transform_error_examples() {
    let pieces = vec![cloud(10, 12, 0.5), cloud(10, 13, 0.5)];
    let gt = vec![pose(rz(0.5), [0.0; 3]), pose(rz(1.0), [0.3, 0.0, 0.0])];
    let e = transform_errors(&instance(pieces.clone(), gt.clone(), gt.clone()));
    assert_eq!((e.rmse_r, e.mae_r, e.rmse_t, e.mae_t), (0.0, 0.0, 0.0, 0.0));

    let one = [cloud(10, 14, 0.5)];
    let rx = rotation_from_euler([FRAC_PI_2, 0.0, 0.0], EulerConvention::IntrinsicXyz);
    let inst = AssemblyInstance {
        pieces: vec![PointCloud::new(one[0].clone()).unwrap()],
        gt: vec![pose(rx, [0.0; 3])],
        pred: Some(vec![Pose::identity()]),
    };
    let angles = euler_angles(&rx, EulerConvention::IntrinsicXyz).map(f64::to_degrees);
    assert!((angles[0] - 90.0).abs() < 1e-12 && angles[1].abs() < 1e-12 && angles[2].abs() < 1e-12);
    let e = transform_errors(&inst);
    assert!((e.mae_r - 30.0).abs() < 1e-10);
    assert!((e.rmse_r - (90.0f64 * 90.0 / 3.0).sqrt()).abs() < 1e-10);

    let inst = AssemblyInstance {
        pieces: vec![PointCloud::new(one[0].clone()).unwrap()],
        gt: vec![Pose::identity()],
        pred: Some(vec![pose(mat3_mul(&rz(0.0), &rz(0.0)), [0.1, 0.0, 0.0])]),
    };
    let e = transform_errors(&inst);
    assert!((e.mae_t - 0.1 / 3.0).abs() < 1e-15);
    assert!((e.rmse_t - 0.1 / 3f64.sqrt()).abs() < 1e-15);
    let e = transform_errors_with(&inst, EulerConvention::IntrinsicXyz, TranslationAggregation::PieceNorms);
    assert!((e.mae_t - 0.1).abs() < 1e-15 && (e.rmse_t - 0.1).abs() < 1e-15);
}

#[test]
fn angle_errors_wrap() {
    let one = PointCloud::new(cloud(5, 15, 0.5)).unwrap();
    let inst = AssemblyInstance {
        pieces: vec![one],
        gt: vec![pose(rz(PI - 0.01), [0.0; 3])],
        pred: Some(vec![pose(rz(-PI + 0.01), [0.0; 3])]),
    };
    let e = transform_errors(&inst);
    assert!((e.mae_r - 0.02f64.to_degrees() / 3.0).abs() < 1e-9);
}

#[test]
fn loss_examples() {
    let pieces = vec![vec![Vec3::new(1.0, 0.0, 0.0)], vec![Vec3::new(0.0, 1.0, 0.0)]];
    let gt = vec![Pose::identity(), Pose::identity()];
    let exact = instance(pieces.clone(), gt.clone(), gt.clone());
    let w = LossWeights::default();
    assert_eq!((w.rot, w.shape, w.chamfer, w.point), (0.2, 1.0, 10.0, 1.0));
    assert_eq!(loss_pose(&exact, 0.2), 0.0);
    assert_eq!(loss_chamfer(&exact, 1.0), 0.0);
    assert_eq!(loss_point(&exact), 0.0);
    assert_eq!(loss_total(&exact, &w), 0.0);

    let flipped = instance(
        pieces.clone(),
        gt.clone(),
        vec![pose(rz(PI), [0.0; 3]), Pose::identity()],
    );
    assert!((loss_pose(&flipped, 0.2) - 1.6).abs() < 1e-12);
    assert!((loss_point(&flipped) - 4.0).abs() < 1e-12);

    let moved = instance(
        pieces.clone(),
        gt.clone(),
        vec![pose(rz(0.0), [3.0, 0.0, 0.0]), Pose::identity()],
    );
    assert_eq!(loss_point(&moved), 0.0);
    assert_eq!(loss_pose(&moved, 0.2), 9.0);

    let w2 = LossWeights {
        rot: 0.0,
        shape: 1.0,
        chamfer: 2.0,
        point: 0.0,
    };
    let w4 = LossWeights { chamfer: 4.0, ..w2 };
    let lc = loss_chamfer(&flipped, 1.0);
    assert!(lc > 0.0);
    let l2 = loss_total(&flipped, &w2);
    assert!((loss_total(&flipped, &w4) - 2.0 * l2).abs() < 1e-12 * l2);
    assert!((l2 - 2.0 * lc - loss_pose(&flipped, 0.0)).abs() < 1e-12);
    assert!(!LossWeights { rot: -1.0, ..w }.is_valid());
}

#[test]
fn chamfer_loss_matches_independent_recomputation() {
    let inst = random_instance(21, 2);
    let pred = inst.pred.clone().unwrap();
    let brute = |a: &[Vec3], b: &[Vec3]| -> f64 {
        let one = |x: &[Vec3], y: &[Vec3]| -> f64 {
            x.iter()
                .map(|p| y.iter().map(|q| (*p - *q).norm_squared()).fold(f64::INFINITY, f64::min))
                .sum()
        };
        one(a, b) + one(b, a)
    };
    let mut expected = 0.0;
    let (mut s, mut s_star) = (Vec::new(), Vec::new());
    for ((c, q), g) in inst.pieces.iter().zip(&pred).zip(&inst.gt) {
        let a: Vec<_> = c.points.iter().map(|&p| q.rotate(p)).collect();
        let b: Vec<_> = c.points.iter().map(|&p| g.rotate(p)).collect();
        expected += brute(&a, &b);
        s.extend(c.points.iter().map(|&p| q.apply(p)));
        s_star.extend(c.points.iter().map(|&p| g.apply(p)));
    }
    expected += 0.7 * brute(&s, &s_star);
    let got = loss_chamfer(&inst, 0.7);
    assert!((got - expected).abs() <= 1e-12 * expected);
}

fn skew(k: [f64; 3]) -> Mat3<f64> {
    [[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]]
}

/// `exp(hK)` by Rodrigues' formula.
fn exp_rot(k: [f64; 3], h: f64) -> Mat3<f64> {
    let n = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let axis = [k[0] / n, k[1] / n, k[2] / n];
    let a = skew(axis);
    let a2 = mat3_mul(&a, &a);
    let (s, c) = (h * n).sin_cos();
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = f64::from(u8::from(i == j)) + s * a[i][j] + (1.0 - c) * a2[i][j];
        }
    }
    out
}

#[test]
fn point_loss_directional_derivative() {
    let mut r = rng(30);
    for trial in 0..20 {
        let inst = random_instance(100 + trial, 3);
        let k = [
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
        ];
        let i = trial as usize % 3;
        let pred = inst.pred.clone().unwrap();
        let at = |h: f64| {
            let mut p = pred.clone();
            p[i] = pose(mat3_mul(&exp_rot(k, h), &pred[i].r), pred[i].t.to_array());
            loss_point(&AssemblyInstance {
                pred: Some(p),
                ..inst.clone()
            })
        };
        // d/dh sum_j |exp(hK) R p - R* p|^2 at 0 = sum_j 2 (R p - R* p) . (K R p)
        let kk = skew(k);
        let analytic: f64 = inst.pieces[i]
            .points
            .iter()
            .map(|&p| {
                let rp = pred[i].rotate(p);
                let d = rp - inst.gt[i].rotate(p);
                let krp = bbx_core::geom::vec::mat3_apply(&kk, rp);
                2.0 * d.dot(krp)
            })
            .sum();
        let h = 1e-5;
        let fd = (at(h) - at(-h)) / (2.0 * h);
        assert!(
            (fd - analytic).abs() <= 1e-4 * analytic.abs().max(1.0),
            "{fd} vs {analytic}"
        );
    }
}

#[test]
fn split_examples() {
    let ids: Vec<String> = (0..10).map(|i| format!("shape{i}")).collect();
    let (train, test) = split_dataset(&ids, 0.8, 3).unwrap();
    assert_eq!((train.len(), test.len()), (8, 2));
    assert_eq!(split_dataset(&ids, 0.8, 3).unwrap(), (train.clone(), test.clone()));
    let mut all: Vec<String> = train.iter().chain(&test).cloned().collect();
    all.sort();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(all, sorted);
    assert!(train.iter().all(|t| !test.contains(t)));
    assert!(split_dataset::<String>(&[], 0.8, 0).is_err());
    assert!(split_dataset(&ids, 1.0, 0).is_err());
    assert!(split_dataset(&ids, 0.0, 0).is_err());
}

#[test]
fn instance_validation() {
    let p = PointCloud::new(cloud(3, 40, 1.0)).unwrap();
    assert!(AssemblyInstance::new(vec![p.clone()], vec![Pose::identity()], None).is_err());
    assert!(AssemblyInstance::new(vec![p.clone(), p.clone()], vec![Pose::identity()], None).is_err());
    assert!(AssemblyInstance::new(
        vec![p.clone(), p],
        vec![Pose::identity(); 2],
        Some(vec![Pose::identity()])
    )
    .is_err());
}

#[test]
fn record_evaluation_and_aggregation() {
    let inst = random_instance(50, 3);
    let rec = InstanceRecord {
        shape: "s".into(),
        category: "everyday".into(),
        pattern: 0,
        pieces: inst
            .pieces
            .iter()
            .zip(&inst.gt)
            .zip(inst.pred.as_ref().unwrap())
            .map(|((c, g), q)| PieceRecord {
                points: c.points.iter().map(|p| p.to_array()).collect(),
                gt: PoseRecord::from(g),
                pred: Some(PoseRecord::from(q)),
            })
            .collect(),
    };
    let json = serde_json::to_string(&EvalSet {
        instances: vec![rec.clone()],
    })
    .unwrap();
    let set: EvalSet = serde_json::from_str(&json).unwrap();
    assert_eq!(set.instances[0].to_instance().unwrap(), inst);
    let settings = EvalSettings::default();
    let row = evaluate_record(&rec, &settings).unwrap();
    let e = transform_errors(&inst);
    assert_eq!(
        (row.rmse_r, row.mae_r, row.rmse_t, row.mae_t),
        (e.rmse_r, e.mae_r, e.rmse_t, e.mae_t)
    );
    assert_eq!(row.pa, part_accuracy(&inst));
    let cd = chamfer_distance(&inst.assembled(true).points, &inst.assembled(false).points);
    assert!((row.cd_e3 - 1e3 * cd).abs() <= 1e-12 * row.cd_e3);

    let other = MetricRow {
        pa: 100.0,
        instances: 1,
        ..MetricRow::default()
    };
    let report = aggregate(
        &[("a".into(), row), ("b".into(), other), ("a".into(), other)],
        settings.clone(),
    );
    assert_eq!(report.mean.instances, 3);
    assert_eq!(report.per_category["a"].instances, 2);
    assert!((report.per_category["a"].pa - (row.pa + 100.0) / 2.0).abs() < 1e-12);
    assert!((report.mean.rmse_r - row.rmse_r / 3.0).abs() < 1e-12);

    let mut no_pred = rec;
    for p in &mut no_pred.pieces {
        p.pred = None;
    }
    assert!(evaluate_record(&no_pred, &settings).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chamfer_is_symmetric_and_permutation_invariant(seed in 0u64..100_000, n in 1usize..60, m in 1usize..60) {
        let p = cloud(n, seed, 1.0);
        let mut q = cloud(m, seed + 1, 1.0);
        let d = chamfer_distance(&p, &q);
        prop_assert!(d >= 0.0);
        prop_assert_eq!(d, chamfer_distance(&q, &p));
        q.shuffle(&mut rng(seed));
        prop_assert!((d - chamfer_distance(&p, &q)).abs() <= 1e-12 * d.max(1.0));
        prop_assert!(d > 0.0);
    }

    #[test]
    fn losses_are_nonnegative(seed in 0u64..100_000) {
        let inst = random_instance(seed, 2);
        prop_assert!(loss_pose(&inst, 0.2) >= 0.0);
        prop_assert!(loss_chamfer(&inst, 1.0) >= 0.0);
        prop_assert!(loss_point(&inst) >= 0.0);
        let exact = AssemblyInstance { pred: Some(inst.gt.clone()), ..inst.clone() };
        prop_assert_eq!(loss_total(&exact, &LossWeights::default()), 0.0);
    }

    #[test]
    fn point_loss_ignores_piece_order(seed in 0u64..100_000) {
        let inst = random_instance(seed, 3);
        let mut rev = inst.clone();
        rev.pieces.reverse();
        rev.gt.reverse();
        rev.pred.as_mut().unwrap().reverse();
        prop_assert!((loss_point(&inst) - loss_point(&rev)).abs() <= 1e-12 * loss_point(&inst).max(1.0));
    }

    #[test]
    fn rotation_errors_ignore_a_shared_left_pose(seed in 0u64..100_000) {
        let inst = random_instance(seed, 3);
        let mut r = rng(seed ^ 0xabc);
        let g = pose(random_rotation(&mut r), [0.4, -2.0, 1.0]);
        let moved = AssemblyInstance {
            gt: inst.gt.iter().map(|p| g.compose(p)).collect(),
            pred: Some(inst.pred.as_ref().unwrap().iter().map(|p| g.compose(p)).collect()),
            ..inst.clone()
        };
        let (a, b) = (transform_errors(&inst), transform_errors(&moved));
        prop_assert!((a.rmse_r - b.rmse_r).abs() < 1e-6);
        prop_assert!((a.mae_r - b.mae_r).abs() < 1e-6);
        prop_assert!((a.rmse_t - b.rmse_t).abs() < 1e-12);
        let agg = TranslationAggregation::PieceNorms;
        let (a, b) = (
            transform_errors_with(&inst, EulerConvention::IntrinsicXyz, agg),
            transform_errors_with(&moved, EulerConvention::IntrinsicXyz, agg),
        );
        prop_assert!((a.mae_t - b.mae_t).abs() < 1e-12);
    }
}

#[test]
fn compose_is_left_application() {
    let mut r = rng(70);
    let a = pose(random_rotation(&mut r), [1.0, 2.0, 3.0]);
    let b = pose(random_rotation(&mut r), [-1.0, 0.5, 0.0]);
    let p = Vec3::new(0.3, -0.7, 0.2);
    assert!((a.compose(&b).apply(p) - a.apply(b.apply(p))).norm() < 1e-12);
    let rt = mat3_mul(&mat3_transpose(&a.r), &a.r);
    assert!((rt[0][0] - 1.0).abs() < 1e-12);
}
