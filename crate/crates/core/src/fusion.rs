//! Grassmann-manifold fusion of sibling patch graphs and the side
//! information derived from the fused embedding.
//!
//! The fused embedding `V` minimizes
//! `Σₖ tr(Vᵀ Lₖ V) − α Σₖ tr(V Vᵀ Uₖ Uₖᵀ)` over `VᵀV = I`, whose solution
//! is the eigenvectors of the `n` smallest eigenvalues of the summary
//! Laplacian `Σₖ Lₖ − α Σₖ Uₖ Uₖᵀ`.

use nalgebra::DMatrix;

use crate::data::{SideInfo, SpectralEmbedding};
use crate::error::{Error, Result};
use crate::kmeans::{kmeans, KMeansResult};
use crate::linalg::smallest_eigenvectors;

/// Children Laplacians and their column-orthonormal embeddings.
#[derive(Debug, Clone)]
pub struct FusionInput {
    laplacians: Vec<DMatrix<f64>>,
    embeddings: Vec<DMatrix<f64>>,
    alpha: f64,
}

impl FusionInput {
    pub fn new(
        laplacians: Vec<DMatrix<f64>>,
        embeddings: Vec<DMatrix<f64>>,
        alpha: f64,
    ) -> Result<Self> {
        if laplacians.is_empty() || laplacians.len() != embeddings.len() {
            return Err(Error::LengthMismatch {
                expected: laplacians.len(),
                found: embeddings.len(),
            });
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidConfig("fusion alpha must be nonnegative".into()));
        }
        let n = laplacians[0].nrows();
        let dim = embeddings[0].ncols();
        for (l, u) in laplacians.iter().zip(&embeddings) {
            if l.shape() != (n, n) || u.shape() != (n, dim) {
                return Err(Error::ShapeMismatch(format!(
                    "fusion inputs must share N={n} and n={dim}"
                )));
            }
            let gram = u.transpose() * u;
            if (gram - DMatrix::<f64>::identity(dim, dim)).abs().max() > 1e-8 {
                return Err(Error::InvalidConfig(
                    "fusion embeddings must have orthonormal columns".into(),
                ));
            }
        }
        Ok(FusionInput {
            laplacians,
            embeddings,
            alpha,
        })
    }

    pub fn len(&self) -> usize {
        self.laplacians.len()
    }

    pub fn is_empty(&self) -> bool {
        self.laplacians.is_empty()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn laplacians(&self) -> &[DMatrix<f64>] {
        &self.laplacians
    }

    pub fn embeddings(&self) -> &[DMatrix<f64>] {
        &self.embeddings
    }
}

/// `Σ Lₖ − α Σ Uₖ Uₖᵀ`, symmetrized.
pub fn summary_laplacian(input: &FusionInput) -> DMatrix<f64> {
    let n = input.laplacians[0].nrows();
    let mut sum_l = DMatrix::zeros(n, n);
    let mut sum_p = DMatrix::zeros(n, n);
    for (l, u) in input.laplacians.iter().zip(&input.embeddings) {
        sum_l += l;
        sum_p += u * u.transpose();
    }
    let m = sum_l - sum_p * input.alpha;
    (&m + m.transpose()) * 0.5
}

/// Column-orthonormal minimizer of the fusion objective (before row
/// normalization).
pub fn fused_basis(input: &FusionInput, n: usize) -> Result<DMatrix<f64>> {
    let m = summary_laplacian(input);
    if n == 0 || n > m.nrows() {
        return Err(Error::InvalidConfig(format!(
            "fused dimension {n} must lie in 1..={}",
            m.nrows()
        )));
    }
    Ok(smallest_eigenvectors(&m, n)?.1)
}

/// Fused embedding with unit-norm rows.
pub fn fuse(input: &FusionInput, n: usize) -> Result<SpectralEmbedding> {
    Ok(SpectralEmbedding::from_unnormalized(fused_basis(input, n)?))
}

/// The fusion objective at an orthonormal `v`.
pub fn fusion_objective(input: &FusionInput, v: &DMatrix<f64>) -> f64 {
    let vvt = v * v.transpose();
    input
        .laplacians
        .iter()
        .zip(&input.embeddings)
        .map(|(l, u)| {
            (v.transpose() * l * v).trace() - input.alpha * (&vvt * (u * u.transpose())).trace()
        })
        .sum()
}

/// `K = V Vᵀ`, clamped to [−1, 1].
pub fn spectral_kernel(v: &SpectralEmbedding) -> DMatrix<f64> {
    let vals = v.values();
    let k = vals * vals.transpose();
    let k = (&k + k.transpose()) * 0.5;
    k.map(|x| x.clamp(-1.0, 1.0))
}

/// Θ from the kernel: `1 − K`, with the penalty dropped where `K ≥ tau`.
pub fn penalty_matrix(kernel: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    kernel.map(|k| if k >= tau { 0.0 } else { (1.0 - k).clamp(0.0, 2.0) })
}

/// Side information plus the k-means run that produced the groups.
#[derive(Debug, Clone)]
pub struct SideInfoBuild {
    pub side_info: SideInfo,
    pub grouping: KMeansResult,
}

/// Θ = 1 − VVᵀ thresholded at `tau`, and groups from k-means on the rows of V.
pub fn build_side_info(
    v: &SpectralEmbedding,
    n_clusters: usize,
    tau: f64,
    seed: u64,
) -> Result<SideInfoBuild> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidConfig(format!(
            "kernel threshold {tau} outside [0, 1]"
        )));
    }
    let theta = penalty_matrix(&spectral_kernel(v), tau);
    let grouping = kmeans(v.values(), n_clusters, seed)?;
    let groups = crate::data::groups_from_labels(&grouping.labels);
    Ok(SideInfoBuild {
        side_info: SideInfo::new(theta, groups)?,
        grouping,
    })
}
