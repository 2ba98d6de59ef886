use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::manifest::DatasetManifest;

pub const PERCENTILES: [f64; 3] = [25.0, 50.0, 75.0];

/// Nearest-rank percentile: the value at rank `ceil(p/100 · n)` of the sorted data.
pub fn percentile_nearest_rank(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty set");
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// The 25th, 50th and 75th percentiles, or `None` for an empty column.
pub fn quartiles(values: &[f64]) -> Option<[f64; 3]> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(PERCENTILES.map(|p| percentile_nearest_rank(&v, p)))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Columns {
    pub shapes: usize,
    pub patterns: usize,
    pub pieces: usize,
    /// Pieces per pattern.
    pub pieces_per_pattern: Option<[f64; 3]>,
    pub vertices_per_piece: Option<[f64; 3]>,
    pub faces_per_piece: Option<[f64; 3]>,
    pub volume_per_piece: Option<[f64; 3]>,
    /// Piece convexity rank, when computed.
    pub convexity_rank: Option<[f64; 3]>,
}

#[derive(Default)]
struct Pool {
    shapes: usize,
    per_pattern: Vec<f64>,
    vertices: Vec<f64>,
    faces: Vec<f64>,
    volumes: Vec<f64>,
    pcr: Vec<f64>,
}

impl Pool {
    fn columns(&self) -> Columns {
        Columns {
            shapes: self.shapes,
            patterns: self.per_pattern.len(),
            pieces: self.vertices.len(),
            pieces_per_pattern: quartiles(&self.per_pattern),
            vertices_per_piece: quartiles(&self.vertices),
            faces_per_piece: quartiles(&self.faces),
            volume_per_piece: quartiles(&self.volumes),
            convexity_rank: quartiles(&self.pcr),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub per_category: BTreeMap<String, Columns>,
    pub overall: Columns,
}

/// Percentiles of the pooled per-pattern and per-piece distributions of the accepted
/// shapes. `pcr` holds convexity ranks keyed by shape id.
pub fn dataset_percentiles(manifest: &DatasetManifest, pcr: Option<&BTreeMap<String, Vec<f64>>>) -> StatsReport {
    let mut overall = Pool::default();
    let mut cats: BTreeMap<String, Pool> = BTreeMap::new();
    for s in manifest.shapes.iter().filter(|s| s.is_ok()) {
        let cat = cats.entry(s.category.name().to_string()).or_default();
        for pool in [&mut overall, cat] {
            pool.shapes += 1;
            for p in &s.patterns {
                pool.per_pattern.push(p.piece_count() as f64);
                for q in &p.pieces {
                    pool.vertices.push(q.vertices as f64);
                    pool.faces.push(q.faces as f64);
                    pool.volumes.push(q.volume);
                }
            }
            if let Some(r) = pcr.and_then(|m| m.get(&s.id)) {
                pool.pcr.extend_from_slice(r);
            }
        }
    }
    StatsReport {
        per_category: cats.iter().map(|(k, v)| (k.clone(), v.columns())).collect(),
        overall: overall.columns(),
    }
}

fn fmt_cell(q: Option<[f64; 3]>, i: usize) -> String {
    match q {
        None => "-".into(),
        Some(v) if v[i].fract() == 0.0 && v[i].abs() < 1e9 => format!("{}", v[i] as i64),
        Some(v) => format!("{:.4}", v[i]),
    }
}

/// Aligned text table, one block per category followed by the overall block.
pub fn format_table(report: &StatsReport) -> String {
    let mut rows: Vec<[String; 5]> = vec![[
        "group".into(),
        "column".into(),
        "p25".into(),
        "p50".into(),
        "p75".into(),
    ]];
    let blocks = report
        .per_category
        .iter()
        .map(|(k, v)| (k.as_str(), v))
        .chain([("all", &report.overall)]);
    for (name, c) in blocks {
        let entries = [
            ("#FP/#O", c.pieces_per_pattern),
            ("#V/#FP", c.vertices_per_piece),
            ("#F/#FP", c.faces_per_piece),
            ("V/#FP", c.volume_per_piece),
            ("PCR", c.convexity_rank),
        ];
        for (label, q) in entries {
            rows.push([
                name.into(),
                label.into(),
                fmt_cell(q, 0),
                fmt_cell(q, 1),
                fmt_cell(q, 2),
            ]);
        }
    }
    let widths: Vec<usize> = (0..5)
        .map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in &rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(i, cell)| {
                if i < 2 {
                    format!("{cell:<w$}", w = widths[i])
                } else {
                    format!("{cell:>w$}", w = widths[i])
                }
            })
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}
