use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bbx_core::evalkit::{
    aggregate, canonicalize_piece, evaluate_record, sample_point_cloud, split_dataset, ChamferNorm, EulerConvention,
    EvalSet, EvalSettings, InstanceRecord, PieceRecord, PoseRecord, TranslationAggregation, DEFAULT_POINTS,
};
use bbx_core::geom::{extract_piece_surfaces_with, load_surface_mesh, tet_adjacency};
use bbx_core::modes::mode_obj;
use bbx_core::segpack::{decode, encode, pattern_obj_files, StoredModes};
use bbx_pipeline::convexity::{convexity_rank, DEFAULT_SAMPLES};
use bbx_pipeline::run::{shape_seed, simulate, WORKERS_ENV};
use bbx_pipeline::{
    dataset_percentiles, explode_view_export, format_table, run_pipeline, DatasetManifest, PipelineConfig,
    PipelineError,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Result<T> = std::result::Result<T, PipelineError>;

#[derive(Parser)]
#[command(name = "bbx", version, about = "Fractured-shape dataset generation and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset: archives plus manifest.json.
    Gen(GenArgs),
    /// Solve the fracture modes of one shape and export them as OBJ files.
    Modes(ModesArgs),
    /// Simulate one shape and write its archive.
    Pack(PackArgs),
    /// Decode an archive into per-fracture OBJ folders.
    Unpack(UnpackArgs),
    /// Percentile statistics of a dataset manifest.
    Stats(StatsArgs),
    /// Assembly metrics of a predictions file.
    Eval(EvalArgs),
    /// Sample canonicalized point clouds of every pattern in a dataset.
    Sample(SampleArgs),
    /// Export one pattern of an archive as an exploded OBJ scene.
    Explode(ExplodeArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn load(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Input files, directories or glob patterns (added to the config's inputs).
    inputs: Vec<String>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct ModesArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    input: PathBuf,
    #[arg(long, short)]
    output: PathBuf,
    /// Displacement scale of the exported pieces.
    #[arg(long, default_value_t = 0.1)]
    amplitude: f64,
}

#[derive(Args)]
struct PackArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    input: PathBuf,
    #[arg(long, short)]
    output: PathBuf,
    /// Also store the mode matrix.
    #[arg(long)]
    store_modes: bool,
}

#[derive(Args)]
struct UnpackArgs {
    archive: PathBuf,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    manifest: PathBuf,
    /// Write the report as JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Pieces per shape whose convexity rank is computed (0 skips it).
    #[arg(long, default_value_t = 0)]
    pcr_pieces: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pcr_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum EulerArg {
    IntrinsicXyz,
    ExtrinsicXyz,
}

#[derive(Clone, Copy, ValueEnum)]
enum TranslationArg {
    Components,
    PieceNorms,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChamferArg {
    Sum,
    Mean,
}

#[derive(Args)]
struct EvalArgs {
    predictions: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "intrinsic-xyz")]
    euler: EulerArg,
    #[arg(long, value_enum, default_value = "components")]
    translation: TranslationArg,
    #[arg(long, value_enum, default_value = "sum")]
    chamfer: ChamferArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SplitArg {
    All,
    Train,
    Test,
}

#[derive(Args)]
struct SampleArgs {
    manifest: PathBuf,
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    #[arg(long, value_enum, default_value = "all")]
    split: SplitArg,
    #[arg(long, default_value_t = 0.8)]
    ratio: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExplodeArgs {
    archive: PathBuf,
    #[arg(long, default_value_t = 0)]
    pattern: usize,
    #[arg(long, default_value_t = 0.5)]
    spacing: f64,
    #[arg(long, short)]
    output: PathBuf,
}

fn write(path: &Path, text: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| PipelineError::Json {
        path: path.into(),
        source,
    })
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn shape_id(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("shape").to_string()
}

fn gen(args: GenArgs) -> Result<ExitCode> {
    let mut cfg = args.cfg.load()?;
    cfg.inputs.extend(args.inputs);
    if let Some(o) = args.output {
        cfg.output = o;
    }
    if args.workers.is_some() {
        cfg.workers = args.workers;
    }
    if args.print_config {
        print!("{}", cfg.to_toml());
        return Ok(ExitCode::SUCCESS);
    }
    let manifest = run_pipeline(&cfg)?;
    let failed = manifest.failures();
    println!(
        "{} shapes, {} failed; manifest at {}",
        manifest.shapes.len(),
        failed,
        cfg.output.join("manifest.json").display()
    );
    Ok(if failed > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn modes(args: ModesArgs) -> Result<ExitCode> {
    let cfg = args.cfg.load()?;
    let surface = load_surface_mesh::<f64>(&args.input)?;
    let sim = simulate(&cfg, &surface, shape_seed(cfg.seed, &shape_id(&args.input)))?;
    for (r, u) in sim.modes.modes.iter().enumerate() {
        let obj = mode_obj(&sim.mesh, &sim.adjacency, u, sim.modes.eps_fault, args.amplitude)?;
        write(&args.output.join(format!("mode_{r:02}.obj")), obj)?;
    }
    let summary: Vec<_> = (0..sim.modes.len())
        .map(|r| {
            serde_json::json!({
                "mode": r,
                "objective": sim.modes.objectives[r],
                "fault_faces": sim.modes.faults[r].len(),
                "converged": sim.modes.converged[r],
            })
        })
        .collect();
    write(&args.output.join("modes.json"), to_json(&summary))?;
    println!(
        "{} modes on {} tets written to {}",
        sim.modes.len(),
        sim.mesh.m(),
        args.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn pack(args: PackArgs) -> Result<ExitCode> {
    let cfg = args.cfg.load()?;
    let surface = load_surface_mesh::<f64>(&args.input)?;
    let sim = simulate(&cfg, &surface, shape_seed(cfg.seed, &shape_id(&args.input)))?;
    let stored = (args.store_modes || cfg.store_modes).then(|| StoredModes::from_modes(&sim.modes));
    if let Some(dir) = args.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    }
    let bytes = encode(&sim.mesh, &sim.superseg, stored.as_ref(), &sim.patterns, &args.output)?;
    println!(
        "{} patterns, {} atomic pieces, {} bytes",
        sim.patterns.len(),
        sim.superseg.atomic_count,
        bytes
    );
    Ok(ExitCode::SUCCESS)
}

fn unpack(args: UnpackArgs) -> Result<ExitCode> {
    let archive = decode::<f64>(&args.archive)?;
    let adj = tet_adjacency(&archive.mesh)?;
    let mut files = Vec::new();
    for (i, p) in archive.patterns.iter().enumerate() {
        files.extend(pattern_obj_files(&archive.mesh, &adj, p, i)?);
    }
    for (rel, text) in &files {
        write(&args.output.join(rel), text)?;
    }
    println!("{} patterns, {} piece files", archive.patterns.len(), files.len());
    Ok(ExitCode::SUCCESS)
}

fn stats(args: StatsArgs) -> Result<ExitCode> {
    let manifest = DatasetManifest::load(&args.manifest)?;
    let root = args.manifest.parent().unwrap_or(Path::new("."));
    let pcr = if args.pcr_pieces > 0 {
        let per_shape: Vec<(String, Vec<f64>)> = manifest
            .shapes
            .par_iter()
            .filter(|s| s.is_ok())
            .filter_map(|s| s.archive.as_ref().map(|a| (s, root.join(a))))
            .map(|(s, path)| {
                let archive = decode::<f64>(&path)?;
                let adj = tet_adjacency(&archive.mesh)?;
                let mut rng = ChaCha8Rng::seed_from_u64(shape_seed(args.seed, &s.id));
                let mut ranks = Vec::new();
                'patterns: for p in &archive.patterns {
                    for piece in extract_piece_surfaces_with(&archive.mesh, &adj, &p.labels)? {
                        if ranks.len() == args.pcr_pieces {
                            break 'patterns;
                        }
                        ranks.push(convexity_rank(&piece, &mut rng, args.pcr_samples)?);
                    }
                }
                Ok((s.id.clone(), ranks))
            })
            .collect::<Result<_>>()?;
        Some(per_shape.into_iter().collect::<BTreeMap<_, _>>())
    } else {
        None
    };
    let report = dataset_percentiles(&manifest, pcr.as_ref());
    if let Some(path) = &args.json {
        write(path, to_json(&report))?;
    }
    print!("{}", format_table(&report));
    Ok(ExitCode::SUCCESS)
}

fn eval(args: EvalArgs) -> Result<ExitCode> {
    let set: EvalSet = read_json(&args.predictions)?;
    let settings = EvalSettings {
        euler: match args.euler {
            EulerArg::IntrinsicXyz => EulerConvention::IntrinsicXyz,
            EulerArg::ExtrinsicXyz => EulerConvention::ExtrinsicXyz,
        },
        translation: match args.translation {
            TranslationArg::Components => TranslationAggregation::Components,
            TranslationArg::PieceNorms => TranslationAggregation::PieceNorms,
        },
        chamfer: match args.chamfer {
            ChamferArg::Sum => ChamferNorm::Sum,
            ChamferArg::Mean => ChamferNorm::Mean,
        },
    };
    let rows = set
        .instances
        .par_iter()
        .map(|rec| Ok((rec.category.clone(), evaluate_record(rec, &settings)?)))
        .collect::<Result<Vec<_>>>()?;
    let report = aggregate(&rows, settings);
    let json = to_json(&report);
    match &args.output {
        Some(path) => write(path, &json)?,
        None => print!("{json}"),
    }
    for (name, r) in report.per_category.iter().chain([(&"mean".to_string(), &report.mean)]) {
        eprintln!(
            "{name:<10} RMSE(R) {:>8.3}  MAE(R) {:>8.3}  RMSE(T) {:>8.4}  MAE(T) {:>8.4}  CDx1e3 {:>9.3}  PA {:>6.2}%",
            r.rmse_r, r.mae_r, r.rmse_t, r.mae_t, r.cd_e3, r.pa
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn sample(args: SampleArgs) -> Result<ExitCode> {
    let manifest = DatasetManifest::load(&args.manifest)?;
    let root = args.manifest.parent().unwrap_or(Path::new("."));
    let ok: Vec<_> = manifest
        .shapes
        .iter()
        .filter(|s| s.is_ok() && s.archive.is_some())
        .collect();
    let ids: Vec<String> = ok.iter().map(|s| s.id.clone()).collect();
    let keep: Vec<String> = if args.split == SplitArg::All || ids.is_empty() {
        ids
    } else {
        let (train, test) = split_dataset(&ids, args.ratio, args.seed)?;
        if args.split == SplitArg::Train {
            train
        } else {
            test
        }
    };
    let chosen: Vec<_> = ok.into_iter().filter(|s| keep.contains(&s.id)).collect();
    let per_shape = chosen
        .par_iter()
        .map(|s| {
            let archive = decode::<f64>(root.join(s.archive.as_ref().unwrap()))?;
            let adj = tet_adjacency(&archive.mesh)?;
            let mut out = Vec::new();
            for (i, p) in archive.patterns.iter().enumerate() {
                let mut rng = ChaCha8Rng::seed_from_u64(shape_seed(args.seed ^ s.seed, &format!("{}#{i}", s.id)));
                let mut pieces = Vec::new();
                for surface in extract_piece_surfaces_with(&archive.mesh, &adj, &p.labels)? {
                    let cloud = sample_point_cloud(&surface, args.points, &mut rng)?;
                    let (canonical, gt) = canonicalize_piece(&cloud, &mut rng);
                    pieces.push(PieceRecord {
                        points: canonical.points.iter().map(|q| q.to_array()).collect(),
                        gt: PoseRecord::from(&gt),
                        pred: None,
                    });
                }
                out.push(InstanceRecord {
                    shape: s.id.clone(),
                    category: s.category.name().into(),
                    pattern: i,
                    pieces,
                });
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let set = EvalSet {
        instances: per_shape.into_iter().flatten().collect(),
    };
    write(&args.output, serde_json::to_string(&set).expect("serializable"))?;
    println!("{} instances from {} shapes", set.instances.len(), chosen.len());
    Ok(ExitCode::SUCCESS)
}

fn explode(args: ExplodeArgs) -> Result<ExitCode> {
    let archive = decode::<f64>(&args.archive)?;
    let pattern = archive.patterns.get(args.pattern).ok_or_else(|| {
        PipelineError::Invalid(format!(
            "archive has {} patterns, asked for {}",
            archive.patterns.len(),
            args.pattern
        ))
    })?;
    let adj = tet_adjacency(&archive.mesh)?;
    write(
        &args.output,
        explode_view_export(&archive.mesh, &adj, &pattern.labels, args.spacing)?,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Modes(a) => modes(a),
        Command::Pack(a) => pack(a),
        Command::Unpack(a) => unpack(a),
        Command::Stats(a) => stats(a),
        Command::Eval(a) => eval(a),
        Command::Sample(a) => sample(a),
        Command::Explode(a) => explode(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
