use std::collections::BTreeMap;

use bbx_pipeline::manifest::{PatternSummary, PieceSummary};
use bbx_pipeline::stats::quartiles;
use bbx_pipeline::{
    dataset_percentiles, format_table, percentile_nearest_rank, Category, DatasetManifest, ShapeRecord, Status,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Smallest value with at least `p` percent of the data at or below it.
fn oracle(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    for (i, x) in v.iter().enumerate() {
        if (i + 1) as f64 * 100.0 >= p * n as f64 {
            return *x;
        }
    }
    v[n - 1]
}

#[test]
fn percentile_examples() {
    let v: Vec<f64> = (1..=100).map(f64::from).collect();
    assert_eq!(quartiles(&v), Some([25.0, 50.0, 75.0]));
    assert_eq!(quartiles(&[4.0; 17]), Some([4.0; 3]));
    assert_eq!(quartiles(&[]), None);
    assert_eq!(percentile_nearest_rank(&[1.0, 2.0, 3.0], 0.0), 1.0);
    assert_eq!(percentile_nearest_rank(&[1.0, 2.0, 3.0], 100.0), 3.0);
}

#[test]
fn percentiles_match_sort_oracle() {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let n = r.random_range(1..200);
        let values: Vec<f64> = (0..n).map(|_| f64::from(r.random_range(0..20u32))).collect();
        let q = quartiles(&values).unwrap();
        for (i, p) in [25.0, 50.0, 75.0].into_iter().enumerate() {
            assert_eq!(q[i], oracle(&values, p));
        }
        let p = r.random_range(0.0..100.0);
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(percentile_nearest_rank(&sorted, p), oracle(&values, p));
    }
}

fn record(id: &str, category: Category, pieces_per_pattern: &[usize]) -> ShapeRecord {
    let mut r = ShapeRecord::failed(id.into(), category, format!("{id}.obj"), 0, String::new());
    r.status = Status::Ok;
    r.reason = None;
    r.tets = 60;
    r.patterns = pieces_per_pattern
        .iter()
        .map(|&n| PatternSummary {
            source: "mode".into(),
            tau: 0.1,
            pieces: (0..n)
                .map(|i| PieceSummary {
                    tets: 60 / n,
                    vertices: 4 + i,
                    faces: 4 + 2 * i,
                    volume: 1.0 / n as f64,
                })
                .collect(),
        })
        .collect();
    r
}

#[test]
fn dataset_columns_per_category() {
    let manifest = DatasetManifest {
        seed: 0,
        patterns_per_shape: 3,
        shapes: vec![
            record("a", Category::Everyday, &[4, 4, 4]),
            record("b", Category::Artifact, &[2, 3, 10]),
            ShapeRecord::failed("c".into(), Category::Other, "c.obj".into(), 0, "broken".into()),
        ],
    };
    assert_eq!(manifest.failures(), 1);
    manifest.check().unwrap();
    let report = dataset_percentiles(&manifest, None);
    let every = &report.per_category["everyday"];
    assert_eq!(every.pieces_per_pattern, Some([4.0; 3]));
    assert_eq!((every.shapes, every.patterns, every.pieces), (1, 3, 12));
    assert!(!report.per_category.contains_key("other"));
    assert_eq!(report.overall.shapes, 2);
    assert_eq!(report.overall.pieces_per_pattern, Some([3.0, 4.0, 4.0]));
    assert_eq!(report.overall.convexity_rank, None);

    let mut pcr = BTreeMap::new();
    pcr.insert("b".to_string(), vec![0.1, 0.2, 0.3, 0.4]);
    let report = dataset_percentiles(&manifest, Some(&pcr));
    assert_eq!(report.per_category["artifact"].convexity_rank, Some([0.1, 0.2, 0.3]));
    let table = format_table(&report);
    assert!(table.contains("#FP/#O") && table.contains("PCR") && table.contains("all"));
    let widths: Vec<usize> = table.lines().map(str::len).collect();
    assert!(widths.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn manifest_check_and_json() {
    let mut m = DatasetManifest {
        seed: 1,
        patterns_per_shape: 2,
        shapes: vec![record("a", Category::Everyday, &[2, 3])],
    };
    m.check().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("manifest.json");
    m.save(&p).unwrap();
    assert_eq!(DatasetManifest::load(&p).unwrap(), m);
    m.shapes[0].patterns.pop();
    assert!(m.check().is_err());
    m.patterns_per_shape = 1;
    m.shapes[0].patterns[0].pieces.truncate(1);
    assert!(m.check().is_err());
}

proptest! {
    #[test]
    fn percentiles_are_order_statistics(values in prop::collection::vec(-1e6f64..1e6, 1..300), p in 0.0f64..=100.0) {
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let x = percentile_nearest_rank(&sorted, p);
        prop_assert!(values.contains(&x));
        let below = values.iter().filter(|&&v| v <= x).count();
        prop_assert!(below as f64 * 100.0 >= p * values.len() as f64);
    }
}
