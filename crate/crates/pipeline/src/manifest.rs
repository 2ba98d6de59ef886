use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Everyday,
    Artifact,
    Other,
}

impl Category {
    /// Taken from the name of the directory that holds the input file.
    pub fn from_path(path: &Path) -> Self {
        let parent = path
            .parent()
            .and_then(|p| p.file_name())
            .and_then(|n| n.to_str())
            .unwrap_or("");
        match parent.to_ascii_lowercase().as_str() {
            "everyday" => Self::Everyday,
            "artifact" | "artifacts" => Self::Artifact,
            _ => Self::Other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Everyday => "everyday",
            Self::Artifact => "artifact",
            Self::Other => "other",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceSummary {
    pub tets: usize,
    pub vertices: usize,
    pub faces: usize,
    pub volume: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternSummary {
    /// `mode` or `impact`.
    pub source: String,
    pub tau: f64,
    pub pieces: Vec<PieceSummary>,
}

impl PatternSummary {
    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeRecord {
    pub id: String,
    pub category: Category,
    pub source: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Seed of the shape's impact stream, derived from the master seed and the id.
    pub seed: u64,
    /// Seed handed to the mode solver.
    pub solver_seed: u64,
    /// Scale applied to fit the input into the unit box.
    pub scale: f64,
    pub unit_box: bool,
    pub tets: usize,
    pub tet_vertices: usize,
    pub volume: f64,
    pub atomic_pieces: usize,
    /// Largest relative gap between the summed piece volumes and the shape volume.
    pub volume_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub archive: Option<String>,
    pub archive_bytes: u64,
    pub patterns: Vec<PatternSummary>,
}

impl ShapeRecord {
    pub fn failed(id: String, category: Category, source: String, seed: u64, reason: String) -> Self {
        Self {
            id,
            category,
            source,
            status: Status::Error,
            reason: Some(reason),
            seed,
            solver_seed: 0,
            scale: 0.0,
            unit_box: false,
            tets: 0,
            tet_vertices: 0,
            volume: 0.0,
            atomic_pieces: 0,
            volume_error: 0.0,
            archive: None,
            archive_bytes: 0,
            patterns: Vec::new(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub seed: u64,
    pub patterns_per_shape: usize,
    pub shapes: Vec<ShapeRecord>,
}

impl DatasetManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| PipelineError::Json {
            path: path.into(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| PipelineError::io(path, e))
    }

    pub fn failures(&self) -> usize {
        self.shapes.iter().filter(|s| !s.is_ok()).count()
    }

    /// Checks the per-shape invariants: accepted shapes carry the full pattern count and
    /// every piece count is at least two.
    pub fn check(&self) -> Result<()> {
        for s in self.shapes.iter().filter(|s| s.is_ok()) {
            if s.patterns.len() != self.patterns_per_shape {
                return Err(PipelineError::Invalid(format!(
                    "shape {} has {} patterns, expected {}",
                    s.id,
                    s.patterns.len(),
                    self.patterns_per_shape
                )));
            }
            if let Some(p) = s.patterns.iter().position(|p| p.piece_count() < 2) {
                return Err(PipelineError::Invalid(format!(
                    "shape {} pattern {p} has fewer than 2 pieces",
                    s.id
                )));
            }
            if let Some(p) = s
                .patterns
                .iter()
                .position(|p| p.pieces.iter().map(|q| q.tets).sum::<usize>() != s.tets)
            {
                return Err(PipelineError::Invalid(format!(
                    "shape {} pattern {p} does not cover its tets",
                    s.id
                )));
            }
        }
        Ok(())
    }
}
