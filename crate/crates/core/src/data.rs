//! Domain types shared across the crate.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column norms below this are treated as zero.
pub const ZERO_NORM: f64 = 1e-12;

/// A D×N matrix of vectorized images (one sample per column) with the
/// image geometry needed to cut patches out of it.
///
/// Pixels are vectorized row-major: pixel `(r, c)` is row `r * width + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataGallery {
    data: DMatrix<f64>,
    height: usize,
    width: usize,
    labels: Option<Vec<usize>>,
}

impl DataGallery {
    pub fn new(
        data: DMatrix<f64>,
        height: usize,
        width: usize,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        validate_gallery(DataGallery {
            data,
            height,
            width,
            labels,
        })
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Ambient dimension D (number of pixels).
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Number of samples N.
    pub fn len(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.data.ncols() == 0
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn with_labels(self, labels: Option<Vec<usize>>) -> Result<Self> {
        DataGallery::new(self.data, self.height, self.width, labels)
    }

    pub fn into_parts(self) -> (DMatrix<f64>, usize, usize, Option<Vec<usize>>) {
        (self.data, self.height, self.width, self.labels)
    }
}

/// Checks every gallery invariant and hands the gallery back unchanged.
pub fn validate_gallery(g: DataGallery) -> Result<DataGallery> {
    let rows = g.data.nrows();
    if g.height == 0 || g.width == 0 || g.height * g.width != rows {
        return Err(Error::DimensionMismatch {
            height: g.height,
            width: g.width,
            rows,
        });
    }
    if g.data.ncols() < 2 {
        return Err(Error::TooFewSamples(g.data.ncols()));
    }
    for (col, column) in g.data.column_iter().enumerate() {
        if let Some(row) = column.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row, col });
        }
    }
    if let Some(labels) = &g.labels {
        if labels.len() != g.data.ncols() {
            return Err(Error::LengthMismatch {
                expected: g.data.ncols(),
                found: labels.len(),
            });
        }
    }
    Ok(g)
}

/// Scales every column to unit ℓ2 norm.
pub fn normalize_columns(g: DataGallery) -> Result<DataGallery> {
    let DataGallery {
        mut data,
        height,
        width,
        labels,
    } = g;
    for (j, mut col) in data.column_iter_mut().enumerate() {
        let norm = col.norm();
        if norm < ZERO_NORM {
            return Err(Error::ZeroColumn(j));
        }
        col /= norm;
    }
    Ok(DataGallery {
        data,
        height,
        width,
        labels,
    })
}

/// Like [`normalize_columns`] but leaves (near) zero columns at zero.
/// Used for patch galleries, where a patch may be blank for some samples.
pub(crate) fn normalize_columns_lenient(data: &mut DMatrix<f64>) {
    for mut col in data.column_iter_mut() {
        let norm = col.norm();
        if norm < ZERO_NORM {
            col.fill(0.0);
        } else {
            col /= norm;
        }
    }
}

/// Remaps arbitrary label values to contiguous `0..k`, in sorted order of the
/// original values.
pub fn remap_labels<T: Ord + Clone>(raw: &[T]) -> Vec<usize> {
    let mut uniq: Vec<T> = raw.to_vec();
    uniq.sort();
    uniq.dedup();
    raw.iter()
        .map(|v| uniq.binary_search(v).expect("value is present"))
        .collect()
}

/// N×N self-expressive coefficients with an exactly zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix(DMatrix<f64>);

impl CoefficientMatrix {
    /// Rejects non-square input, non-finite entries and any nonzero diagonal entry.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "coefficient matrix must be square, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        for (col, column) in values.column_iter().enumerate() {
            if let Some(row) = column.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row, col });
            }
        }
        if let Some(i) = (0..values.nrows()).find(|&i| values[(i, i)] != 0.0) {
            return Err(Error::NonzeroDiagonal(i));
        }
        Ok(CoefficientMatrix(values))
    }

    /// Builds `J - diag(J)`.
    pub fn from_zeroed_diagonal(mut values: DMatrix<f64>) -> Result<Self> {
        values.fill_diagonal(0.0);
        CoefficientMatrix::new(values)
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

/// N×n spectral embedding whose rows have unit ℓ2 norm, except rows that
/// were zero before normalization; those stay zero and are flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEmbedding {
    values: DMatrix<f64>,
    degenerate: Vec<bool>,
}

impl SpectralEmbedding {
    /// Row-normalizes `raw`.
    pub fn from_unnormalized(mut raw: DMatrix<f64>) -> Self {
        let mut degenerate = vec![false; raw.nrows()];
        for (i, mut row) in raw.row_iter_mut().enumerate() {
            let norm = row.norm();
            if norm < ZERO_NORM {
                row.fill(0.0);
                degenerate[i] = true;
            } else {
                row /= norm;
            }
        }
        SpectralEmbedding {
            values: raw,
            degenerate,
        }
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn degenerate(&self) -> &[bool] {
        &self.degenerate
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }
}

/// Guidance for an upper-level solve: the cannot-link penalty matrix Θ and
/// the recommended-link groups G.
#[derive(Debug, Clone, PartialEq)]
pub struct SideInfo {
    theta: DMatrix<f64>,
    groups: Vec<Vec<usize>>,
}

impl SideInfo {
    pub fn new(theta: DMatrix<f64>, groups: Vec<Vec<usize>>) -> Result<Self> {
        let n = theta.nrows();
        if !theta.is_square() {
            return Err(Error::ShapeMismatch("theta must be square".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let t = theta[(i, j)];
                if !(0.0..=2.0).contains(&t) {
                    return Err(Error::InvalidConfig(format!(
                        "theta[{i},{j}] = {t} is outside [0, 2]"
                    )));
                }
                if (t - theta[(j, i)]).abs() > 1e-10 {
                    return Err(Error::InvalidConfig(format!(
                        "theta is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        check_partition(&groups, n)?;
        Ok(SideInfo { theta, groups })
    }

    /// Zero penalty, every sample in its own group.
    pub fn neutral(n: usize) -> Self {
        SideInfo {
            theta: DMatrix::zeros(n, n),
            groups: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn theta(&self) -> &DMatrix<f64> {
        &self.theta
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }
}

/// Groups `0..labels.len()` by label value; empty labels are skipped.
pub fn groups_from_labels(labels: &[usize]) -> Vec<Vec<usize>> {
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut groups = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        groups[l].push(i);
    }
    groups.retain(|g| !g.is_empty());
    groups
}

pub(crate) fn check_partition(groups: &[Vec<usize>], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for g in groups {
        if g.is_empty() {
            return Err(Error::InvalidConfig("empty group".into()));
        }
        for &i in g {
            if i >= n || seen[i] {
                return Err(Error::InvalidConfig(format!(
                    "groups do not partition 0..{n} (index {i})"
                )));
            }
            seen[i] = true;
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidConfig(format!("index {i} is in no group")));
    }
    Ok(())
}

/// How upper-level solves are guided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Guidance {
    /// Θ and G from the fused children embedding.
    #[default]
    Fused,
    /// Θ = 0 and singleton groups; isolates the effect of guidance.
    Neutral,
}

/// Solver and pipeline parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Sets μ = alpha / max_{i≠j} |x_iᵀ x_j|.
    pub alpha: f64,
    /// Weight of the cannot-link penalty.
    pub lambda1: f64,
    /// Weight of the recommended-link group penalty.
    pub lambda2: f64,
    /// ADMM penalty; `None` ties it to μ.
    pub beta: Option<f64>,
    /// Kernel values at or above this drop their cannot-link penalty.
    pub kernel_threshold: f64,
    pub max_iters: usize,
    /// Relative primal residual ‖Z−C‖_F / max(1, ‖C‖_F) that stops ADMM.
    pub residual_tol: f64,
    /// Number of hierarchy levels s (1 = plain SSC).
    pub levels: usize,
    /// Patches per split: 4 (2×2) or 9 (3×3).
    pub patches_per_level: usize,
    pub overlap_fraction: f64,
    pub n_clusters: usize,
    /// Weight of the Grassmann projection term in the summary Laplacian.
    pub fusion_alpha: f64,
    pub guidance: Guidance,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            alpha: 20.0,
            lambda1: 1.0,
            lambda2: 10.0,
            beta: None,
            kernel_threshold: 0.8,
            max_iters: 200,
            residual_tol: 1e-6,
            levels: 2,
            patches_per_level: 4,
            overlap_fraction: 0.0,
            n_clusters: 2,
            fusion_alpha: 20.0,
            guidance: Guidance::Fused,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.lambda1 >= 0.0 && self.lambda1.is_finite()) {
            return bad("lambda1 must be nonnegative");
        }
        if !(self.lambda2 >= 0.0 && self.lambda2.is_finite()) {
            return bad("lambda2 must be nonnegative");
        }
        if let Some(beta) = self.beta {
            if !(beta > 0.0 && beta.is_finite()) {
                return bad("beta must be positive");
            }
        }
        if !(0.0..=1.0).contains(&self.kernel_threshold) {
            return bad("kernel_threshold must lie in [0, 1]");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        if self.residual_tol.is_nan() || self.residual_tol <= 0.0 {
            return bad("residual_tol must be positive");
        }
        if self.levels == 0 {
            return bad("levels must be at least 1");
        }
        if self.patches_per_level != 4 && self.patches_per_level != 9 {
            return bad("patches_per_level must be 4 or 9");
        }
        if !(0.0..0.5).contains(&self.overlap_fraction) {
            return bad("overlap_fraction must lie in [0, 0.5)");
        }
        if self.n_clusters == 0 {
            return bad("n_clusters must be positive");
        }
        if !(self.fusion_alpha >= 0.0 && self.fusion_alpha.is_finite()) {
            return bad("fusion_alpha must be nonnegative");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn gallery(data: DMatrix<f64>, h: usize, w: usize) -> Result<DataGallery> {
        DataGallery::new(data, h, w, None)
    }

    #[test]
    fn consistent_dims_validate() {
        let g = gallery(DMatrix::from_element(4, 3, 1.0), 2, 2).unwrap();
        assert_eq!(validate_gallery(g.clone()).unwrap(), g);
    }

    #[test]
    fn geometry_must_match_rows() {
        let err = gallery(DMatrix::from_element(4, 3, 1.0), 2, 3).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn nan_is_rejected() {
        let mut m = DMatrix::from_element(4, 3, 1.0);
        m[(2, 1)] = f64::NAN;
        assert!(matches!(
            gallery(m, 2, 2),
            Err(Error::NonFinite { row: 2, col: 1 })
        ));
    }

    #[test]
    fn single_sample_is_rejected() {
        assert!(matches!(
            gallery(DMatrix::from_element(4, 1, 1.0), 2, 2),
            Err(Error::TooFewSamples(1))
        ));
    }

    #[test]
    fn normalize_scales_to_unit() {
        let g = gallery(dmatrix![3.0, 1.0; 4.0, 0.0], 2, 1).unwrap();
        let n = normalize_columns(g).unwrap();
        assert!((n.data()[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((n.data()[(1, 0)] - 0.8).abs() < 1e-15);
        let again = normalize_columns(n.clone()).unwrap();
        assert!((again.data() - n.data()).abs().max() < 1e-12);
    }

    #[test]
    fn zero_column_is_an_error() {
        let g = gallery(dmatrix![3.0, 0.0; 4.0, 0.0], 2, 1).unwrap();
        assert!(matches!(normalize_columns(g), Err(Error::ZeroColumn(1))));
    }

    #[test]
    fn coefficient_matrix_rejects_diagonal() {
        let m = dmatrix![0.0, 1.0; 1.0, 1e-300];
        assert!(matches!(
            CoefficientMatrix::new(m.clone()),
            Err(Error::NonzeroDiagonal(1))
        ));
        let c = CoefficientMatrix::from_zeroed_diagonal(m).unwrap();
        assert_eq!(c.values()[(1, 1)], 0.0);
    }

    #[test]
    fn side_info_checks_partition_and_range() {
        let theta = DMatrix::from_element(3, 3, 1.0);
        assert!(SideInfo::new(theta.clone(), vec![vec![0, 1], vec![2]]).is_ok());
        assert!(SideInfo::new(theta.clone(), vec![vec![0, 1]]).is_err());
        assert!(SideInfo::new(theta.clone(), vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(SideInfo::new(DMatrix::from_element(3, 3, 2.5), vec![vec![0, 1, 2]]).is_err());
    }

    #[test]
    fn labels_are_remapped_in_sorted_order() {
        assert_eq!(remap_labels(&[7, 3, 7, 9]), vec![1, 0, 1, 2]);
        assert_eq!(remap_labels(&["b", "a"]), vec![1, 0]);
    }

    #[test]
    fn default_config_is_valid() {
        SolverConfig::default().validate().unwrap();
        let cfg = SolverConfig {
            patches_per_level: 5,
            ..SolverConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
