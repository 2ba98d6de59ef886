mod common;

use bbx_core::geom::{load_surface_mesh, primitives};
use bbx_core::Vec3;
use bbx_pipeline::run::{collect_inputs, is_unit_box, shape_seed};
use bbx_pipeline::{process_shape, run_pipeline, simulate, Category, Status};
use common::*;

#[test]
fn inputs_from_files_dirs_and_globs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_shape(dir.path(), "everyday", "bowl", &cube());
    write_shape(dir.path(), "artifact", "vase", &sphere());
    std::fs::write(dir.path().join("notes.txt"), "x").unwrap();

    let all = collect_inputs(&[dir.path().display().to_string()]).unwrap();
    let ids: Vec<_> = all.iter().map(|s| (s.id.as_str(), s.category)).collect();
    assert_eq!(ids, [("vase", Category::Artifact), ("bowl", Category::Everyday)]);

    let globbed = collect_inputs(&[format!("{}/*/*.obj", dir.path().display())]).unwrap();
    assert_eq!(globbed.len(), 2);
    let dup = collect_inputs(&[a.display().to_string(), dir.path().display().to_string()]).unwrap();
    assert_eq!(dup.len(), 2);
    assert!(collect_inputs(&[dir.path().join("nope.obj").display().to_string()]).is_err());
}

#[test]
fn per_shape_seeds_are_stable_and_distinct() {
    assert_eq!(shape_seed(1, "bowl"), shape_seed(1, "bowl"));
    assert_ne!(shape_seed(1, "bowl"), shape_seed(2, "bowl"));
    assert_ne!(shape_seed(1, "bowl"), shape_seed(1, "vase"));
}

#[test]
fn simulation_of_a_cube() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(vec![], dir.path().into());
    let sim = simulate(&cfg, &cube(), 5).unwrap();
    assert!(is_unit_box(&sim.normalized));
    assert_eq!(sim.patterns.len(), 100);
    assert_eq!(sim.modes.len(), cfg.modes.k);
    for p in &sim.patterns {
        assert!((2..=100).contains(&p.piece_count), "{}", p.piece_count);
        assert_eq!(p.labels.len(), sim.mesh.m());
    }
    let (summaries, worst) = bbx_pipeline::run::summarize_patterns(&sim.mesh, &sim.adjacency, &sim.patterns).unwrap();
    assert!(worst <= 1e-9, "{worst}");
    let total: f64 = summaries[0].pieces.iter().map(|p| p.volume).sum();
    assert!((total - sim.mesh.volume()).abs() < 1e-12);
}

#[test]
fn unreadable_shape_becomes_failed_record() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("broken.obj");
    std::fs::write(&bad, "v 0 0 0\nf 1 2 3\n").unwrap();
    let mut open = primitives::cube(Vec3::zero(), 1.0);
    open.faces.truncate(10);
    let leaky = write_shape(dir.path(), "other", "leaky", &open);
    let cfg = tiny_config(vec![], dir.path().join("out"));
    for p in [bad, leaky] {
        let input = collect_inputs(&[p.display().to_string()]).unwrap().remove(0);
        let rec = process_shape(&cfg, &input);
        assert_eq!(rec.status, Status::Error, "{:?}", p);
        assert!(rec.reason.is_some() && rec.archive.is_none());
    }
}

#[test]
fn pipeline_writes_manifest_and_archives() {
    let dir = tempfile::tempdir().unwrap();
    let src = write_shape(dir.path(), "everyday", "box", &cube());
    let cfg = tiny_config(vec![src.display().to_string()], dir.path().join("out"));
    let manifest = run_pipeline(&cfg).unwrap();
    manifest.check().unwrap();
    assert_eq!(manifest.failures(), 0);
    let rec = &manifest.shapes[0];
    assert_eq!(rec.patterns.len(), 100);
    let archive = cfg.output.join(rec.archive.as_ref().unwrap());
    let decoded = bbx_core::segpack::decode::<f64>(&archive).unwrap();
    assert_eq!(decoded.patterns.len(), 100);
    let reread = bbx_pipeline::DatasetManifest::load(cfg.output.join("manifest.json")).unwrap();
    assert_eq!(reread, manifest);
    let original = load_surface_mesh::<f64>(&src).unwrap();
    assert_eq!(original.faces.len(), cube().faces.len());
}
