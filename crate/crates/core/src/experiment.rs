//! Experiment configuration, presets and the drivers behind the CLI.
//!
//! A run writes into `output_dir`:
//!
//! | file | content |
//! |------|---------|
//! | `labels.csv` | `index,label` of the primary algorithm (LG-SSC when enabled, else SSC) |
//! | `labels_ssc.csv` | baseline labels when both algorithms ran |
//! | `metrics.json` | scores, solver residuals, runtimes and the config echo |
//! | `coef.bin` | primary coefficient matrix, `UOSG` layout with N×1 geometry |
//! | `embedding2d.csv` | `index,x,y,label` from eigenvectors 2..3 of the primary affinity |
//! | `diagnostics.json` | per-node solve traces of the hierarchy |
//!
//! `metrics.json` schema (version 1), floats printed with 17 significant digits:
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "nmi_normalization": "sqrt",
//!   "n_samples": N, "dim": D, "height": h, "width": w,
//!   "primary": "lgssc" | "ssc",
//!   "acc": f | null, "nmi": f | null, "ari": f | null,      // primary algorithm
//!   "algorithms": {
//!     "ssc":   { "acc", "nmi", "ari", "runtime_seconds", "residuals": SolveSummary },
//!     "lgssc": { "acc", "nmi", "ari", "runtime_seconds", "residuals": SolveSummary,   // root solve
//!                "nodes": [ { "level", "index", "iterations", "status", "final_relative_residual" } ] }
//!   },
//!   "runtime_seconds": f,
//!   "config": ExperimentConfig
//! }
//! ```
//!
//! Scores are `null` when the gallery carries no ground-truth labels.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{DataGallery, Guidance, SolverConfig};
use crate::error::{Error, Result};
use crate::io::{self, GalleryFormat};
use crate::metrics::{score, Scores, NMI_NORMALIZATION};
use crate::pipeline::{run_lgssc, run_ssc_baseline, SolveSummary};
use crate::solver::SolveStatus;
use crate::spectral::embedding_2d;
use crate::synth::{corrupt, generate, CorruptionSpec, Fill, SubspaceSpec};

/// Environment variable capping worker threads (0 or unset = all cores).
pub const THREADS_ENV: &str = "SUBSPACE_THREADS";

/// Where the samples come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source", deny_unknown_fields)]
pub enum DatasetSource {
    File {
        path: PathBuf,
        /// Detected from the path when absent.
        #[serde(default)]
        format: Option<GalleryFormat>,
        /// Optional `index,label` file overriding embedded labels.
        #[serde(default)]
        labels: Option<PathBuf>,
        /// Expected `[height, width]`; checked against the file when present.
        #[serde(default)]
        geometry: Option<[usize; 2]>,
    },
    Synthetic {
        spec: SubspaceSpec,
        height: usize,
        width: usize,
        #[serde(default)]
        corruption: Option<CorruptionSpec>,
    },
}

impl DatasetSource {
    pub fn load(&self) -> Result<DataGallery> {
        match self {
            DatasetSource::File {
                path,
                format,
                labels,
                geometry,
            } => {
                if !path.exists() {
                    return Err(Error::InvalidConfig(format!("{} does not exist", path.display())));
                }
                let format = format.unwrap_or_else(|| GalleryFormat::detect(path));
                let mut g = io::load_gallery(path, format)?;
                if let Some([h, w]) = *geometry {
                    if (h, w) != (g.height(), g.width()) {
                        return Err(Error::GeometryMismatch(format!(
                            "config expects {h}x{w}, {} is {}x{}",
                            path.display(),
                            g.height(),
                            g.width()
                        )));
                    }
                }
                if let Some(lp) = labels {
                    let l = io::load_labels(lp, g.len())?;
                    g = g.with_labels(Some(l))?;
                }
                Ok(g)
            }
            DatasetSource::Synthetic {
                spec,
                height,
                width,
                corruption,
            } => {
                let g = generate(spec, *height, *width)?;
                match corruption {
                    Some(c) => corrupt(&g, c),
                    None => Ok(g),
                }
            }
        }
    }

    /// Re-seeds a synthetic source (data seed `seed`, corruption seed
    /// `seed + 1000`); file sources are returned unchanged.
    pub fn reseeded(&self, seed: u64) -> Self {
        let mut out = self.clone();
        if let DatasetSource::Synthetic { spec, corruption, .. } = &mut out {
            spec.seed = seed;
            if let Some(c) = corruption {
                c.seed = seed.wrapping_add(1000);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Emit {
    pub labels: bool,
    pub metrics: bool,
    pub coefficient_matrix: bool,
    pub embedding_2d: bool,
    pub per_node_diagnostics: bool,
}

impl Default for Emit {
    fn default() -> Self {
        Emit {
            labels: true,
            metrics: true,
            coefficient_matrix: false,
            embedding_2d: false,
            per_node_diagnostics: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Algorithms {
    pub ssc: bool,
    pub lgssc: bool,
}

impl Default for Algorithms {
    fn default() -> Self {
        Algorithms { ssc: true, lgssc: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Preset the config was derived from, if any (informational).
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub dataset: Option<DatasetSource>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub algorithms: Algorithms,
    #[serde(default)]
    pub emit: Emit,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("lgssc-out")
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            preset: None,
            dataset: None,
            solver: SolverConfig::default(),
            algorithms: Algorithms::default(),
            emit: Emit::default(),
            output_dir: default_output_dir(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if self.dataset.is_none() {
            return Err(Error::InvalidConfig("no dataset given".into()));
        }
        if !self.algorithms.ssc && !self.algorithms.lgssc {
            return Err(Error::InvalidConfig("no algorithm enabled".into()));
        }
        Ok(())
    }
}

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 5] = ["yaleb", "ar", "coil20", "synthetic", "occlusion"];

/// Face/object profiles carry tuned solver parameters only (the dataset
/// path is user-supplied); `synthetic` and `occlusion` also carry data.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let base = SolverConfig::default();
    let (solver, dataset) = match name {
        "yaleb" => (
            SolverConfig {
                alpha: 20.0,
                fusion_alpha: 20.0,
                lambda1: 1.0,
                lambda2: 10.0,
                patches_per_level: 4,
                levels: 2,
                ..base
            },
            None,
        ),
        "ar" => (
            SolverConfig {
                alpha: 100.0,
                fusion_alpha: 100.0,
                lambda1: 5.0,
                lambda2: 10.0,
                patches_per_level: 4,
                levels: 3,
                ..base
            },
            None,
        ),
        "coil20" => (
            SolverConfig {
                alpha: 20.0,
                fusion_alpha: 20.0,
                lambda1: 2.0,
                lambda2: 10.0,
                patches_per_level: 9,
                overlap_fraction: 0.25,
                levels: 2,
                ..base
            },
            None,
        ),
        "synthetic" => (
            SolverConfig {
                n_clusters: 3,
                ..base
            },
            Some(DatasetSource::Synthetic {
                spec: SubspaceSpec {
                    ambient_dim: 36,
                    subspace_dims: vec![3; 3],
                    points_per_subspace: 20,
                    noise_sigma: 0.0,
                    shared_basis: 0,
                    seed: 0,
                },
                height: 6,
                width: 6,
                corruption: None,
            }),
        ),
        "occlusion" => (
            SolverConfig {
                n_clusters: 3,
                ..base
            },
            Some(occlusion_benchmark_source(0)),
        ),
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown preset {other:?}; expected one of {PRESETS:?}"
            )))
        }
    };
    Ok(ExperimentConfig {
        preset: Some(name.to_string()),
        dataset,
        solver,
        ..ExperimentConfig::default()
    })
}

/// The scaled occlusion benchmark: three 6-dim subspaces of 16×16 images
/// sharing 3 basis directions, 20 points each, with one noise texture
/// pasted over the top-left quadrant of 30% of the samples.
pub fn occlusion_benchmark_source(seed: u64) -> DatasetSource {
    DatasetSource::Synthetic {
        spec: SubspaceSpec {
            ambient_dim: 256,
            subspace_dims: vec![6; 3],
            points_per_subspace: 20,
            noise_sigma: 0.0,
            shared_basis: 3,
            seed,
        },
        height: 16,
        width: 16,
        corruption: Some(CorruptionSpec::quadrant_occlusion_with(
            16,
            16,
            0.3,
            Fill::SharedNoise,
            seed.wrapping_add(1000),
        )),
    }
}

/// Worker threads requested through [`THREADS_ENV`] (`None` = automatic).
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(_) => Err(Error::InvalidConfig(format!("{THREADS_ENV}={v:?} is not a thread count"))),
        },
    }
}

/// Configures the global rayon pool from [`THREADS_ENV`]. Only the first
/// call in a process has an effect.
pub fn init_thread_pool() -> Result<()> {
    if let Some(n) = threads_from_env()? {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::debug!("thread pool already initialized; {THREADS_ENV} ignored");
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgorithmReport {
    pub acc: Option<f64>,
    pub nmi: Option<f64>,
    pub ari: Option<f64>,
    pub runtime_seconds: f64,
    pub residuals: SolveSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<NodeResidual>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeResidual {
    pub level: usize,
    pub index: usize,
    pub iterations: usize,
    pub status: SolveStatus,
    pub final_relative_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgorithmReports {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ssc: Option<AlgorithmReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lgssc: Option<AlgorithmReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub nmi_normalization: &'static str,
    pub n_samples: usize,
    pub dim: usize,
    pub height: usize,
    pub width: usize,
    pub primary: &'static str,
    pub acc: Option<f64>,
    pub nmi: Option<f64>,
    pub ari: Option<f64>,
    pub algorithms: AlgorithmReports,
    pub runtime_seconds: f64,
    pub config: ExperimentConfig,
}

/// In-memory result of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub labels: Vec<usize>,
    pub ssc_labels: Option<Vec<usize>>,
    pub report: MetricsReport,
    /// Files written, in order.
    pub written: Vec<PathBuf>,
}

fn scored(pred: &[usize], truth: Option<&[usize]>) -> Result<Option<Scores>> {
    truth.map(|t| score(pred, t)).transpose()
}

fn report(scores: Option<Scores>, secs: f64, residuals: SolveSummary, nodes: Option<Vec<NodeResidual>>) -> AlgorithmReport {
    AlgorithmReport {
        acc: scores.map(|s| s.acc),
        nmi: scores.map(|s| s.nmi),
        ari: scores.map(|s| s.ari),
        runtime_seconds: secs,
        residuals,
        nodes,
    }
}

fn warn_unconverged<'a>(name: &str, solves: impl IntoIterator<Item = &'a SolveSummary>) {
    let (mut total, mut stopped, mut worst) = (0, 0, 0.0_f64);
    for s in solves {
        total += 1;
        if s.status != SolveStatus::Converged {
            stopped += 1;
            worst = worst.max(s.final_relative_residual);
        }
    }
    if stopped > 0 {
        log::warn!("{name}: {stopped} of {total} ADMM solve(s) hit max_iters; worst relative residual {worst:e}");
    }
}

/// Loads or generates the data, runs the enabled algorithms and writes
/// the requested files.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let gallery = cfg.dataset.as_ref().expect("validated").load()?;
    log::info!(
        "gallery: D={} N={} ({}x{}), labels: {}",
        gallery.dim(),
        gallery.len(),
        gallery.height(),
        gallery.width(),
        gallery.labels().is_some()
    );
    let truth = gallery.labels();

    let ssc = if cfg.algorithms.ssc {
        let t = Instant::now();
        let out = run_ssc_baseline(&gallery, &cfg.solver)?;
        let secs = t.elapsed().as_secs_f64();
        warn_unconverged("ssc", [&out.solve]);
        log::info!("ssc finished in {secs:.3}s");
        Some((out, secs))
    } else {
        None
    };
    let lg = if cfg.algorithms.lgssc {
        let t = Instant::now();
        let out = run_lgssc(&gallery, &cfg.solver)?;
        let secs = t.elapsed().as_secs_f64();
        warn_unconverged("lgssc", out.diagnostics.iter().map(|d| &d.solve));
        log::info!("lgssc finished in {secs:.3}s");
        Some((out, secs))
    } else {
        None
    };

    let ssc_report = ssc
        .as_ref()
        .map(|(o, secs)| Ok::<_, Error>(report(scored(&o.labels, truth)?, *secs, o.solve.clone(), None)))
        .transpose()?;
    let lg_report = lg
        .as_ref()
        .map(|(o, secs)| {
            let nodes = o
                .diagnostics
                .iter()
                .map(|d| NodeResidual {
                    level: d.level,
                    index: d.index,
                    iterations: d.solve.iterations,
                    status: d.solve.status,
                    final_relative_residual: d.solve.final_relative_residual,
                })
                .collect();
            Ok::<_, Error>(report(
                scored(&o.labels, truth)?,
                *secs,
                o.diagnostics[0].solve.clone(),
                Some(nodes),
            ))
        })
        .transpose()?;

    let (primary, labels, coefficients) = match (&lg, &ssc) {
        (Some((o, _)), _) => ("lgssc", o.labels.clone(), o.root_coefficients()),
        (None, Some((o, _))) => ("ssc", o.labels.clone(), &o.coefficients),
        (None, None) => unreachable!("validated"),
    };
    let primary_report = lg_report.as_ref().or(ssc_report.as_ref()).expect("one algorithm ran");

    let mut written = Vec::new();
    let dir = &cfg.output_dir;
    let wants_files = cfg.emit.labels
        || cfg.emit.metrics
        || cfg.emit.coefficient_matrix
        || cfg.emit.embedding_2d
        || cfg.emit.per_node_diagnostics;
    if wants_files {
        io::ensure_dir(dir)?;
    }
    if cfg.emit.labels {
        let p = dir.join("labels.csv");
        io::write_labels_csv(&labels, &p)?;
        written.push(p);
        if let (Some((o, _)), true) = (&ssc, lg.is_some()) {
            let p = dir.join("labels_ssc.csv");
            io::write_labels_csv(&o.labels, &p)?;
            written.push(p);
        }
    }
    if cfg.emit.coefficient_matrix {
        let p = dir.join("coef.bin");
        io::save_matrix_binary(coefficients.values(), &p)?;
        written.push(p);
    }
    if cfg.emit.embedding_2d {
        let p = dir.join("embedding2d.csv");
        io::write_embedding_csv(&embedding_2d(coefficients)?, &labels, &p)?;
        written.push(p);
        if let Some(fused) = lg.as_ref().and_then(|(o, _)| o.fused_root()) {
            if fused.ncols() >= 2 {
                let p = dir.join("fused_embedding.csv");
                let xy = fused.values().columns(0, 2).clone_owned();
                io::write_embedding_csv(&xy, &labels, &p)?;
                written.push(p);
            }
        }
    }
    if cfg.emit.per_node_diagnostics {
        if let Some((o, _)) = &lg {
            let p = dir.join("diagnostics.json");
            io::write_json(&o.diagnostics, &p)?;
            written.push(p);
        }
    }

    let report = MetricsReport {
        schema_version: 1,
        nmi_normalization: NMI_NORMALIZATION,
        n_samples: gallery.len(),
        dim: gallery.dim(),
        height: gallery.height(),
        width: gallery.width(),
        primary,
        acc: primary_report.acc,
        nmi: primary_report.nmi,
        ari: primary_report.ari,
        algorithms: AlgorithmReports {
            ssc: ssc_report,
            lgssc: lg_report,
        },
        runtime_seconds: start.elapsed().as_secs_f64(),
        config: cfg.clone(),
    };
    if cfg.emit.metrics {
        let p = dir.join("metrics.json");
        io::write_json(&report, &p)?;
        written.push(p);
    }
    Ok(ExperimentOutcome {
        labels,
        ssc_labels: ssc.map(|(o, _)| o.labels),
        report,
        written,
    })
}

/// One seed of a paired SSC vs LG-SSC comparison.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub seed: u64,
    pub ssc: Scores,
    pub lgssc: Scores,
    pub ssc_seconds: f64,
    pub lgssc_seconds: f64,
}

impl BenchRow {
    pub fn acc_gain(&self) -> f64 {
        self.lgssc.acc - self.ssc.acc
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchSummary {
    pub rows: Vec<BenchRow>,
    pub median_ssc_acc: f64,
    pub median_lgssc_acc: f64,
    pub median_acc_gain: f64,
}

/// Midpoint median; `NaN` for an empty slice.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Runs SSC and LG-SSC on `seeds` independently. Synthetic sources are
/// regenerated per seed; every seed also drives the solver's k-means.
/// Ground-truth labels are required.
pub fn run_bench(dataset: &DatasetSource, solver: &SolverConfig, seeds: &[u64]) -> Result<BenchSummary> {
    solver.validate()?;
    let rows: Vec<BenchRow> = seeds
        .par_iter()
        .map(|&seed| {
            let g = dataset.reseeded(seed).load()?;
            let truth = g
                .labels()
                .ok_or_else(|| Error::InvalidConfig("bench needs ground-truth labels".into()))?
                .to_vec();
            let cfg = SolverConfig {
                seed,
                ..solver.clone()
            };
            let t = Instant::now();
            let ssc = run_ssc_baseline(&g, &cfg)?;
            let ssc_seconds = t.elapsed().as_secs_f64();
            let t = Instant::now();
            let lg = run_lgssc(&g, &cfg)?;
            let lgssc_seconds = t.elapsed().as_secs_f64();
            let row = BenchRow {
                seed,
                ssc: score(&ssc.labels, &truth)?,
                lgssc: score(&lg.labels, &truth)?,
                ssc_seconds,
                lgssc_seconds,
            };
            log::info!(
                "seed {seed}: ssc acc {:.2}, lgssc acc {:.2}",
                row.ssc.acc,
                row.lgssc.acc
            );
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let col = |f: &dyn Fn(&BenchRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    Ok(BenchSummary {
        median_ssc_acc: median(&col(&|r| r.ssc.acc)),
        median_lgssc_acc: median(&col(&|r| r.lgssc.acc)),
        median_acc_gain: median(&col(&|r| r.acc_gain())),
        rows,
    })
}

/// Per-seed CSV: `seed,ssc_acc,ssc_nmi,ssc_ari,lgssc_acc,lgssc_nmi,lgssc_ari,acc_gain,ssc_seconds,lgssc_seconds`.
pub fn write_bench_csv<W: std::io::Write>(summary: &BenchSummary, mut w: W) -> Result<()> {
    writeln!(
        w,
        "seed,ssc_acc,ssc_nmi,ssc_ari,lgssc_acc,lgssc_nmi,lgssc_ari,acc_gain,ssc_seconds,lgssc_seconds"
    )?;
    for r in &summary.rows {
        let f = io::fmt_f64;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.seed,
            f(r.ssc.acc),
            f(r.ssc.nmi),
            f(r.ssc.ari),
            f(r.lgssc.acc),
            f(r.lgssc.nmi),
            f(r.lgssc.ari),
            f(r.acc_gain()),
            f(r.ssc_seconds),
            f(r.lgssc_seconds)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Human-readable summary of a gallery and the hierarchy `solver` implies.
pub fn describe(g: &DataGallery, solver: &SolverConfig) -> Result<String> {
    use std::fmt::Write;
    let mut s = String::new();
    let _ = writeln!(s, "samples: {}", g.len());
    let _ = writeln!(s, "dimension: {} ({}x{})", g.dim(), g.height(), g.width());
    match g.labels() {
        Some(l) => {
            let k = l.iter().max().map_or(0, |m| m + 1);
            let mut counts = vec![0usize; k];
            for &x in l {
                counts[x] += 1;
            }
            let _ = writeln!(s, "labels: {k} classes, sizes {counts:?}");
        }
        None => {
            let _ = writeln!(s, "labels: none");
        }
    }
    let (lo, hi) = g
        .data()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let _ = writeln!(s, "value range: [{lo}, {hi}]");
    let h = crate::hierarchy::build_hierarchy(
        g.height(),
        g.width(),
        solver.levels,
        solver.patches_per_level,
        solver.overlap_fraction,
    )?;
    let _ = writeln!(
        s,
        "hierarchy: s={} p={} overlap={} ({} nodes)",
        h.num_levels(),
        h.patches_per_level(),
        h.overlap_fraction(),
        h.node_count()
    );
    for (i, nodes) in h.nodes_by_level().iter().enumerate() {
        let mut sizes: Vec<(usize, usize)> = nodes.iter().map(|n| (n.rect.height, n.rect.width)).collect();
        sizes.sort_unstable();
        sizes.dedup();
        let _ = writeln!(s, "  level {}: {} patch(es), sizes {:?}", i + 1, nodes.len(), sizes);
    }
    let _ = writeln!(
        s,
        "guidance: {}",
        match solver.guidance {
            Guidance::Fused => "fused",
            Guidance::Neutral => "neutral",
        }
    );
    Ok(s)
}
