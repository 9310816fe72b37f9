//! `lgssc` command line: `run`, `bench`, `gen`, `inspect`.
//!
//! Settings are layered: preset, then a JSON config file, then flags.
//! Logs go to stderr (`RUST_LOG`), results to files or stdout.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use lgssc::experiment::{self, DatasetSource, ExperimentConfig};
use lgssc::io::{self, GalleryFormat, PgmImage};
use lgssc::{DataGallery, Guidance, Result};

#[derive(Parser)]
#[command(name = "lgssc", version, about = "Locally-guided sparse subspace clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster one dataset and write labels/metrics/plot data.
    Run(RunArgs),
    /// Paired multi-seed SSC vs LG-SSC comparison; per-seed CSV.
    Bench(BenchArgs),
    /// Write a synthetic dataset to disk.
    Gen(GenArgs),
    /// Print a gallery and hierarchy summary.
    Inspect(InspectArgs),
}

#[derive(Args, Default)]
struct Common {
    /// Start from a named preset (yaleb, ar, coil20, synthetic, occlusion).
    #[arg(long)]
    preset: Option<String>,
    /// JSON experiment config; its keys override the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Gallery file (.csv, UOSG binary) or PGM directory.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// `index,label` ground truth overriding embedded labels.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    n_clusters: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    lambda1: Option<f64>,
    #[arg(long)]
    lambda2: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    fusion_alpha: Option<f64>,
    /// Kernel threshold τ.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    patches: Option<usize>,
    #[arg(long)]
    overlap: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    guidance: Option<GuidanceArg>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Run only one algorithm.
    #[arg(long, value_enum)]
    only: Option<AlgoArg>,
    #[arg(long)]
    emit_coef: bool,
    #[arg(long)]
    emit_embedding: bool,
    #[arg(long)]
    emit_diagnostics: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    /// Number of seeds (first seed = --seed, default 0).
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    /// CSV destination; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, short)]
    out: PathBuf,
    /// Output format; defaults from the path (directory → pgm).
    #[arg(long = "as", value_enum)]
    as_format: Option<FormatArg>,
}

#[derive(Args)]
struct InspectArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Bin,
    Pgm,
}

impl From<FormatArg> for GalleryFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => GalleryFormat::Csv,
            FormatArg::Bin => GalleryFormat::Binary,
            FormatArg::Pgm => GalleryFormat::PgmDir,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GuidanceArg {
    Fused,
    Neutral,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Ssc,
    Lgssc,
}

/// Overlays `patch` onto `base`, recursing into objects.
fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    // Dataset sources are tagged unions; replace wholesale.
                    Some(slot) if k != "dataset" => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, p) => *slot = p,
    }
}

fn resolve(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &c.preset {
        Some(name) => experiment::preset(name)?,
        None => ExperimentConfig::default(),
    };
    if let Some(path) = &c.config {
        let mut value = serde_json::to_value(&cfg)?;
        merge(&mut value, serde_json::from_str(&std::fs::read_to_string(path)?)?);
        cfg = serde_json::from_value(value)?;
    }
    if let Some(path) = &c.data {
        cfg.dataset = Some(DatasetSource::File {
            path: path.clone(),
            format: c.format.map(Into::into),
            labels: c.labels.clone(),
            geometry: None,
        });
    } else if let Some(DatasetSource::File { format, labels, .. }) = &mut cfg.dataset {
        if let Some(f) = c.format {
            *format = Some(f.into());
        }
        if c.labels.is_some() {
            labels.clone_from(&c.labels);
        }
    }
    let s = &mut cfg.solver;
    macro_rules! set {
        ($flag:expr, $field:expr) => {
            if let Some(v) = $flag {
                $field = v;
            }
        };
    }
    set!(c.n_clusters, s.n_clusters);
    set!(c.alpha, s.alpha);
    set!(c.lambda1, s.lambda1);
    set!(c.lambda2, s.lambda2);
    set!(c.fusion_alpha, s.fusion_alpha);
    set!(c.tau, s.kernel_threshold);
    set!(c.levels, s.levels);
    set!(c.patches, s.patches_per_level);
    set!(c.overlap, s.overlap_fraction);
    set!(c.max_iters, s.max_iters);
    set!(c.tol, s.residual_tol);
    set!(c.seed, s.seed);
    if c.beta.is_some() {
        s.beta = c.beta;
    }
    if let Some(g) = c.guidance {
        s.guidance = match g {
            GuidanceArg::Fused => Guidance::Fused,
            GuidanceArg::Neutral => Guidance::Neutral,
        };
    }
    Ok(cfg)
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let mut cfg = resolve(&a.common)?;
    if let Some(out) = a.out {
        cfg.output_dir = out;
    }
    match a.only {
        Some(AlgoArg::Ssc) => cfg.algorithms.lgssc = false,
        Some(AlgoArg::Lgssc) => cfg.algorithms.ssc = false,
        None => {}
    }
    cfg.emit.coefficient_matrix |= a.emit_coef;
    cfg.emit.embedding_2d |= a.emit_embedding;
    cfg.emit.per_node_diagnostics |= a.emit_diagnostics;
    let outcome = experiment::run_experiment(&cfg)?;
    let r = &outcome.report;
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
    for (name, rep) in [("ssc", &r.algorithms.ssc), ("lgssc", &r.algorithms.lgssc)] {
        if let Some(rep) = rep {
            println!(
                "{name}: acc {} nmi {} ari {} ({:.2}s)",
                fmt(rep.acc),
                fmt(rep.nmi),
                fmt(rep.ari),
                rep.runtime_seconds
            );
        }
    }
    for p in &outcome.written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let mut common = a.common;
    if common.preset.is_none() && common.config.is_none() && common.data.is_none() {
        common.preset = Some("occlusion".into());
    }
    let cfg = resolve(&common)?;
    let dataset = cfg
        .dataset
        .ok_or_else(|| lgssc::Error::InvalidConfig("no dataset given".into()))?;
    let first = cfg.solver.seed;
    let seeds: Vec<u64> = (first..first + a.seeds).collect();
    let summary = experiment::run_bench(&dataset, &cfg.solver, &seeds)?;
    match &a.out {
        Some(path) => {
            experiment::write_bench_csv(&summary, std::io::BufWriter::new(std::fs::File::create(path)?))?;
            println!("wrote {}", path.display());
        }
        None => experiment::write_bench_csv(&summary, std::io::stdout().lock())?,
    }
    println!(
        "median over {} seeds: ssc acc {:.2}, lgssc acc {:.2}, gain {:+.2}",
        summary.rows.len(),
        summary.median_ssc_acc,
        summary.median_lgssc_acc,
        summary.median_acc_gain
    );
    Ok(())
}

/// Writes one 8-bit PGM per sample (min-max scaled over the gallery) plus
/// `labels.csv`.
fn write_pgm_dir(g: &DataGallery, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let (lo, hi) = g
        .data()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let digits = g.len().to_string().len();
    let mut labels = String::from("filename,label\n");
    for (j, col) in g.data().column_iter().enumerate() {
        let name = format!("img{j:0digits$}.pgm");
        let img = PgmImage {
            width: g.width(),
            height: g.height(),
            maxval: 255,
            pixels: col.iter().map(|&v| ((v - lo) / span * 255.0).round() as u8).collect(),
        };
        io::write_pgm(&img, &dir.join(&name))?;
        if let Some(l) = g.labels() {
            labels.push_str(&format!("{name},{}\n", l[j]));
        }
    }
    if g.labels().is_some() {
        std::fs::write(dir.join("labels.csv"), labels)?;
    }
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let mut common = a.common;
    if common.preset.is_none() && common.config.is_none() {
        common.preset = Some("synthetic".into());
    }
    let cfg = resolve(&common)?;
    let mut dataset = cfg
        .dataset
        .ok_or_else(|| lgssc::Error::InvalidConfig("no dataset given".into()))?;
    if !matches!(dataset, DatasetSource::Synthetic { .. }) {
        return Err(lgssc::Error::InvalidConfig("gen needs a synthetic dataset".into()));
    }
    if let Some(seed) = common.seed {
        dataset = dataset.reseeded(seed);
    }
    let g = dataset.load()?;
    let format = a
        .as_format
        .map(GalleryFormat::from)
        .unwrap_or_else(|| match a.out.extension() {
            None => GalleryFormat::PgmDir,
            Some(_) => GalleryFormat::detect(&a.out),
        });
    match format {
        GalleryFormat::Csv => {
            io::save_csv(&g, &a.out)?;
            if let Some(l) = g.labels() {
                io::write_labels_csv(l, &a.out.with_extension("labels.csv"))?;
            }
        }
        GalleryFormat::Binary => io::save_binary(&g, &a.out)?,
        GalleryFormat::PgmDir => write_pgm_dir(&g, &a.out)?,
    }
    println!("wrote {} (D={}, N={})", a.out.display(), g.dim(), g.len());
    Ok(())
}

fn cmd_inspect(a: InspectArgs) -> Result<()> {
    let cfg = resolve(&a.common)?;
    let dataset = cfg
        .dataset
        .ok_or_else(|| lgssc::Error::InvalidConfig("no dataset given".into()))?;
    let g = dataset.load()?;
    print!("{}", experiment::describe(&g, &cfg.solver)?);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    if let Err(e) = experiment::init_thread_pool() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Inspect(a) => cmd_inspect(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut msg = format!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                msg.push_str(&format!("\n  caused by: {s}"));
                src = s.source();
            }
            eprintln!("{msg}");
            ExitCode::FAILURE
        }
    }
}
