//! Plain SSC baseline and the bottom-up locally-guided pipeline.

use rayon::prelude::*;
use serde::Serialize;

use crate::data::{normalize_columns, CoefficientMatrix, DataGallery, Guidance, SideInfo, SolverConfig, SpectralEmbedding};
use crate::error::{Error, Result};
use crate::fusion::{build_side_info, fuse, FusionInput};
use crate::hierarchy::{build_hierarchy, extract_patch_gallery, PatchHierarchy};
use crate::kmeans::kmeans;
use crate::solver::{compute_mu, solve, GuidedProblem, SolveOutput, SolveStatus};
use crate::spectral::{analyze, cluster_embedding, SpectralAnalysis};

/// Deterministic per-node seed (splitmix64 finalizer).
pub(crate) fn derive_seed(seed: u64, level: usize, index: usize) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((level as u64) << 32)
        .wrapping_add(index as u64);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn beta_for(cfg: &SolverConfig, mu: f64) -> f64 {
    cfg.beta.unwrap_or(mu)
}

/// Solve-level summary kept per node and per baseline run.
#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub mu: f64,
    pub beta: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub final_relative_residual: f64,
    pub relative_residuals: Vec<f64>,
}

impl SolveSummary {
    fn new(mu: f64, beta: f64, out: &SolveOutput) -> Self {
        SolveSummary {
            mu,
            beta,
            iterations: out.state.iteration,
            status: out.status,
            final_relative_residual: out.final_relative_residual(),
            relative_residuals: out.history.iter().map(|r| r.relative_residual).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SscOutput {
    pub labels: Vec<usize>,
    pub coefficients: CoefficientMatrix,
    pub analysis: SpectralAnalysis,
    pub solve: SolveSummary,
}

/// Plain SSC on the whole gallery followed by spectral clustering.
pub fn run_ssc_baseline(g: &DataGallery, cfg: &SolverConfig) -> Result<SscOutput> {
    cfg.validate()?;
    let g = normalize_columns(g.clone())?;
    check_cluster_count(&g, cfg)?;
    let x = g.data().clone();
    let mu = compute_mu(&x, cfg.alpha)?;
    let beta = beta_for(cfg, mu);
    let out = solve(&GuidedProblem::plain(x, mu, beta), cfg)?;
    let coefficients = out.coefficients().clone();
    let analysis = analyze(&coefficients, cfg.n_clusters)?;
    let labels = cluster_embedding(&analysis.embedding, cfg.n_clusters, cfg.seed)?.labels;
    Ok(SscOutput {
        labels,
        coefficients,
        analysis,
        solve: SolveSummary::new(mu, beta, &out),
    })
}

fn check_cluster_count(g: &DataGallery, cfg: &SolverConfig) -> Result<()> {
    if cfg.n_clusters > g.len() {
        return Err(Error::InvalidConfig(format!(
            "{} clusters requested for {} samples",
            cfg.n_clusters,
            g.len()
        )));
    }
    Ok(())
}

/// Per-node record of the bottom-up pass.
#[derive(Debug, Clone, Serialize)]
pub struct NodeDiagnostics {
    pub level: usize,
    pub index: usize,
    pub patch_height: usize,
    pub patch_width: usize,
    pub guided: bool,
    pub solve: SolveSummary,
    /// Labels from k-means on the node's own spectral embedding.
    pub labels: Vec<usize>,
    pub kmeans_inertia: f64,
    /// Inertia of the k-means run that produced the recommended-link groups.
    pub grouping_inertia: Option<f64>,
}

/// Everything computed for one node.
#[derive(Debug, Clone)]
pub struct LevelResult {
    pub level: usize,
    pub index: usize,
    pub coefficients: CoefficientMatrix,
    pub analysis: SpectralAnalysis,
    /// Fused children embedding (internal nodes only).
    pub fused: Option<SpectralEmbedding>,
    pub side_info: Option<SideInfo>,
    pub diagnostics: NodeDiagnostics,
}

#[derive(Debug, Clone)]
pub struct LgsscOutput {
    pub labels: Vec<usize>,
    pub root: LevelResult,
    /// Diagnostics for every node, root first, then level by level.
    pub diagnostics: Vec<NodeDiagnostics>,
    pub hierarchy: PatchHierarchy,
}

impl LgsscOutput {
    pub fn root_coefficients(&self) -> &CoefficientMatrix {
        &self.root.coefficients
    }

    /// The fused children embedding at the root, when s ≥ 2.
    pub fn fused_root(&self) -> Option<&SpectralEmbedding> {
        self.root.fused.as_ref()
    }
}

fn process_node(
    g: &DataGallery,
    hierarchy: &PatchHierarchy,
    level: usize,
    index: usize,
    children: Option<&[&LevelResult]>,
    cfg: &SolverConfig,
) -> Result<LevelResult> {
    let node = &hierarchy.level(level)[index];
    let patch = extract_patch_gallery(g, node)?;
    let x = patch.data().clone();
    let n = g.len();
    let mu = compute_mu(&x, cfg.alpha)?;
    let beta = beta_for(cfg, mu);
    let node_seed = derive_seed(cfg.seed, level, index);

    let (problem, fused, side_info, grouping_inertia) = match children {
        None => (GuidedProblem::plain(x, mu, beta), None, None, None),
        Some(children) => {
            let input = FusionInput::new(
                children.iter().map(|c| c.analysis.laplacian.values().clone()).collect(),
                children.iter().map(|c| c.analysis.basis.clone()).collect(),
                cfg.fusion_alpha,
            )?;
            let fused = fuse(&input, cfg.n_clusters)?;
            let (side, inertia) = match cfg.guidance {
                Guidance::Fused => {
                    let built = build_side_info(&fused, cfg.n_clusters, cfg.kernel_threshold, node_seed)?;
                    (built.side_info, Some(built.grouping.inertia))
                }
                Guidance::Neutral => (SideInfo::neutral(n), None),
            };
            let problem = GuidedProblem::guided(x, &side, cfg.lambda1, cfg.lambda2, mu, beta);
            (problem, Some(fused), Some(side), inertia)
        }
    };

    let out = solve(&problem, cfg)?;
    let coefficients = out.coefficients().clone();
    let analysis = analyze(&coefficients, cfg.n_clusters)?;
    let own = kmeans(analysis.embedding.values(), cfg.n_clusters, node_seed)?;
    let diagnostics = NodeDiagnostics {
        level,
        index,
        patch_height: node.rect.height,
        patch_width: node.rect.width,
        guided: children.is_some(),
        solve: SolveSummary::new(mu, beta, &out),
        labels: own.labels,
        kmeans_inertia: own.inertia,
        grouping_inertia,
    };
    Ok(LevelResult {
        level,
        index,
        coefficients,
        analysis,
        fused,
        side_info,
        diagnostics,
    })
}

/// Runs the full hierarchy bottom-up and clusters the root coefficients.
pub fn run_lgssc(g: &DataGallery, cfg: &SolverConfig) -> Result<LgsscOutput> {
    cfg.validate()?;
    let g = normalize_columns(g.clone())?;
    check_cluster_count(&g, cfg)?;
    let hierarchy = build_hierarchy(
        g.height(),
        g.width(),
        cfg.levels,
        cfg.patches_per_level,
        cfg.overlap_fraction,
    )?;

    let mut below: Option<Vec<LevelResult>> = None;
    let mut diagnostics_by_level: Vec<Vec<NodeDiagnostics>> = Vec::new();
    for level in (1..=hierarchy.num_levels()).rev() {
        let nodes = hierarchy.level(level);
        let results: Vec<LevelResult> = nodes
            .par_iter()
            .enumerate()
            .map(|(index, node)| {
                let children: Option<Vec<&LevelResult>> = below
                    .as_ref()
                    .map(|prev| node.children.iter().map(|&c| &prev[c]).collect());
                process_node(&g, &hierarchy, level, index, children.as_deref(), cfg).map_err(|e| {
                    Error::Node {
                        level,
                        index,
                        source: Box::new(e),
                    }
                })
            })
            .collect::<Result<_>>()?;
        log::debug!("level {level}: {} node(s) solved", results.len());
        diagnostics_by_level.push(results.iter().map(|r| r.diagnostics.clone()).collect());
        below = Some(results);
    }

    let root = below
        .and_then(|mut v| v.pop())
        .expect("the root level has one node");
    let labels = cluster_embedding(&root.analysis.embedding, cfg.n_clusters, cfg.seed)?.labels;
    let diagnostics = diagnostics_by_level.into_iter().rev().flatten().collect();
    Ok(LgsscOutput {
        labels,
        root,
        diagnostics,
        hierarchy,
    })
}
