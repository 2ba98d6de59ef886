use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use bbx_core::fem::{lift_discontinuous, DiscreteOperators};
use bbx_core::fracture::{generate_fractures, FracturePattern, Provenance};
use bbx_core::geom::{
    extract_cage, load_surface_mesh, normalize_to_unit_box, piece_surfaces_with_origins, tet_adjacency,
    tetrahedralize_voxels, voxelize_sdf, write_obj, FaceAdjacency, SurfaceMesh, TetMesh, UnitBoxTransform,
};
use bbx_core::modes::{fracture_modes, FractureModes};
use bbx_core::segpack::{encode_to_vec, super_segmentation, StoredModes, SuperSegmentation};
use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::error::{PipelineError, Result};
use crate::manifest::{Category, DatasetManifest, PatternSummary, PieceSummary, ShapeRecord, Status};

pub const WORKERS_ENV: &str = "BBX_WORKERS";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeInput {
    pub id: String,
    pub path: PathBuf,
    pub category: Category,
}

/// Expands files, directories and glob patterns into sorted inputs with unique ids.
pub fn collect_inputs(inputs: &[String]) -> Result<Vec<ShapeInput>> {
    let mut paths = Vec::new();
    for entry in inputs {
        let p = Path::new(entry);
        if p.is_dir() {
            collect_dir(p, &mut paths)?;
        } else if p.exists() {
            paths.push(p.to_path_buf());
        } else if !entry.contains(['*', '?', '[']) {
            return Err(PipelineError::Config(format!("input {entry} does not exist")));
        } else {
            let matches = glob::glob(entry).map_err(|e| PipelineError::Config(format!("bad pattern {entry}: {e}")))?;
            paths.extend(matches.filter_map(|m| m.ok()));
        }
    }
    paths.sort();
    paths.dedup();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    Ok(paths
        .into_iter()
        .map(|path| {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("shape");
            let base: String = stem
                .chars()
                .map(|c| {
                    if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                        c
                    } else {
                        '_'
                    }
                })
                .collect();
            let n = seen.entry(base.clone()).or_insert(0);
            *n += 1;
            let id = if *n == 1 { base } else { format!("{base}-{n}") };
            ShapeInput {
                id,
                category: Category::from_path(&path),
                path,
            }
        })
        .collect())
}

fn collect_dir(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = std::fs::read_dir(dir).map_err(|e| PipelineError::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| PipelineError::io(dir, e))?.path();
        if path.is_dir() {
            collect_dir(&path, out)?;
        } else if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("obj")) {
            out.push(path);
        }
    }
    Ok(())
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of a shape: depends on the master seed and the id only.
pub fn shape_seed(master: u64, id: &str) -> u64 {
    let h = id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    });
    splitmix(master ^ splitmix(h))
}

/// Everything computed for one shape.
pub struct Simulation {
    pub normalized: SurfaceMesh<f64>,
    pub transform: UnitBoxTransform<f64>,
    pub cage: SurfaceMesh<f64>,
    pub mesh: TetMesh<f64>,
    pub adjacency: FaceAdjacency<f64>,
    pub ops: DiscreteOperators<f64>,
    pub modes: FractureModes<f64>,
    pub superseg: SuperSegmentation,
    pub patterns: Vec<FracturePattern>,
}

/// Normalized surface, its transform, the cage and the simulation mesh.
pub type TetBuild = (SurfaceMesh<f64>, UnitBoxTransform<f64>, SurfaceMesh<f64>, TetMesh<f64>);

/// Normalization, signed distance, cage and voxel tetrahedralization.
pub fn build_tet_mesh(cfg: &PipelineConfig, surface: &SurfaceMesh<f64>) -> Result<TetBuild> {
    let (normalized, transform) = normalize_to_unit_box(surface)?;
    let sdf = voxelize_sdf(&normalized, cfg.grid_n)?;
    let cage_grid = sdf.resample(cfg.cage_res)?;
    let offset = cage_grid.spacing;
    let cage = extract_cage(&cage_grid, offset)?;
    let mesh = tetrahedralize_voxels(&sdf.resample(cfg.tet_res)?, offset)?;
    Ok((normalized, transform, cage, mesh))
}

/// Runs the simulation for one surface; `seed` drives both the mode solver and the impacts.
pub fn simulate(cfg: &PipelineConfig, surface: &SurfaceMesh<f64>, seed: u64) -> Result<Simulation> {
    let (normalized, transform, cage, mesh) = build_tet_mesh(cfg, surface)?;
    let adjacency = tet_adjacency(&mesh)?;
    let ops = lift_discontinuous(&mesh, &cfg.material, adjacency.clone())?;
    let mut solver = cfg.modes.clone();
    solver.seed = solver_seed(cfg, seed);
    let modes = fracture_modes(&mesh, &ops, &solver)?;
    let patterns = generate_fractures(&mesh, &ops, &modes, &cfg.fracture, seed)?;
    let superseg = super_segmentation(&ops, &modes, modes.eps_fault);
    Ok(Simulation {
        normalized,
        transform,
        cage,
        mesh,
        adjacency,
        ops,
        modes,
        superseg,
        patterns,
    })
}

fn solver_seed(cfg: &PipelineConfig, seed: u64) -> u64 {
    splitmix(seed ^ cfg.modes.seed)
}

/// Whether the surface fills the unit box centered at the origin.
pub fn is_unit_box(mesh: &SurfaceMesh<f64>) -> bool {
    let b = mesh.bbox();
    let e = b.extent();
    let c = b.center();
    (e.max_component() - 1.0).abs() <= 1e-12 && c.norm() <= 1e-12
}

/// Per-pattern piece statistics and the largest relative volume accounting error.
pub fn summarize_patterns(
    mesh: &TetMesh<f64>,
    adj: &FaceAdjacency<f64>,
    patterns: &[FracturePattern],
) -> Result<(Vec<PatternSummary>, f64)> {
    let volume = mesh.volume();
    let mut worst: f64 = 0.0;
    let mut out = Vec::with_capacity(patterns.len());
    for p in patterns {
        let tets = p.piece_sizes();
        let pieces: Vec<PieceSummary> = piece_surfaces_with_origins(mesh, adj, &p.labels)?
            .iter()
            .zip(tets)
            .map(|((s, _), tets)| PieceSummary {
                tets,
                vertices: s.vertices.len(),
                faces: s.faces.len(),
                volume: s.signed_volume(),
            })
            .collect();
        let total: f64 = pieces.iter().map(|q| q.volume).sum();
        worst = worst.max((total - volume).abs() / volume);
        let source = match p.provenance {
            Provenance::Field => "field",
            Provenance::Mode { .. } => "mode",
            Provenance::Impact { .. } => "impact",
        };
        out.push(PatternSummary {
            source: source.into(),
            tau: p.tau,
            pieces,
        });
    }
    Ok((out, worst))
}

pub fn archive_rel_path(id: &str) -> String {
    format!("archives/{id}.bbx")
}

/// Simulates, archives and summarizes one shape; failures become error records.
pub fn process_shape(cfg: &PipelineConfig, input: &ShapeInput) -> ShapeRecord {
    let seed = shape_seed(cfg.seed, &input.id);
    let source = input.path.to_string_lossy().into_owned();
    let outcome = catch_unwind(AssertUnwindSafe(|| try_process(cfg, input, seed)));
    let failure = match outcome {
        Ok(Ok(record)) => return record,
        Ok(Err(e)) => e.to_string(),
        Err(panic) => panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .map_or_else(|| "panic".into(), |m| format!("panic: {m}")),
    };
    log::warn!("shape {} failed: {failure}", input.id);
    ShapeRecord::failed(input.id.clone(), input.category, source, seed, failure)
}

fn try_process(cfg: &PipelineConfig, input: &ShapeInput, seed: u64) -> Result<ShapeRecord> {
    let surface = load_surface_mesh::<f64>(&input.path)?;
    let sim = simulate(cfg, &surface, seed)?;
    let stored = cfg.store_modes.then(|| StoredModes::from_modes(&sim.modes));
    let bytes = encode_to_vec(&sim.mesh, &sim.superseg, stored.as_ref(), &sim.patterns)?;
    let rel = archive_rel_path(&input.id);
    let path = cfg.output.join(&rel);
    std::fs::write(&path, &bytes).map_err(|e| PipelineError::io(&path, e))?;
    if cfg.export_cages {
        write_obj(&sim.cage, cfg.output.join(format!("cages/{}.obj", input.id)))?;
    }
    let (patterns, volume_error) = summarize_patterns(&sim.mesh, &sim.adjacency, &sim.patterns)?;
    log::info!(
        "shape {}: {} tets, {} atomic pieces, {} patterns, {} bytes",
        input.id,
        sim.mesh.m(),
        sim.superseg.atomic_count,
        patterns.len(),
        bytes.len()
    );
    Ok(ShapeRecord {
        id: input.id.clone(),
        category: input.category,
        source: input.path.to_string_lossy().into_owned(),
        status: Status::Ok,
        reason: None,
        seed,
        solver_seed: solver_seed(cfg, seed),
        scale: sim.transform.scale,
        unit_box: is_unit_box(&sim.normalized),
        tets: sim.mesh.m(),
        tet_vertices: sim.mesh.n(),
        volume: sim.mesh.volume(),
        atomic_pieces: sim.superseg.atomic_count,
        volume_error,
        archive: Some(rel),
        archive_bytes: bytes.len() as u64,
        patterns,
    })
}

/// Worker count from the config, then the environment, then the machine.
pub fn worker_count(cfg: &PipelineConfig) -> usize {
    cfg.workers
        .or_else(|| {
            std::env::var(WORKERS_ENV)
                .ok()
                .and_then(|v| v.parse().ok())
                .filter(|&n| n > 0)
        })
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Processes every input in parallel and writes the archives and `manifest.json` under
/// the output directory. Records keep input order whatever the scheduling.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<DatasetManifest> {
    cfg.validate()?;
    let inputs = collect_inputs(&cfg.inputs)?;
    if inputs.is_empty() {
        return Err(PipelineError::Config("no input shapes".into()));
    }
    for dir in ["archives", "cages"].iter().take(if cfg.export_cages { 2 } else { 1 }) {
        let d = cfg.output.join(dir);
        std::fs::create_dir_all(&d).map_err(|e| PipelineError::io(&d, e))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(cfg))
        .build()
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    let shapes = pool.install(|| inputs.par_iter().map(|i| process_shape(cfg, i)).collect());
    let manifest = DatasetManifest {
        seed: cfg.seed,
        patterns_per_shape: cfg.patterns_per_shape(),
        shapes,
    };
    manifest.save(cfg.output.join("manifest.json"))?;
    Ok(manifest)
}
