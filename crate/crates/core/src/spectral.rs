//! Affinity construction, normalized Laplacian, spectral embedding and
//! spectral clustering of a coefficient matrix.

use nalgebra::{DMatrix, DVector};

use crate::data::{CoefficientMatrix, SpectralEmbedding};
use crate::error::{Error, Result};
use crate::kmeans::{kmeans, KMeansResult};
use crate::linalg::smallest_eigenvectors;

/// Symmetric, nonnegative, zero-diagonal affinity `|C| + |Cᵀ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affinity(DMatrix<f64>);

impl Affinity {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn degrees(&self) -> DVector<f64> {
        DVector::from_iterator(self.0.nrows(), self.0.row_iter().map(|r| r.sum()))
    }
}

/// `I − D^{-1/2} A D^{-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix(DMatrix<f64>);

impl LaplacianMatrix {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

pub fn symmetrize(c: &CoefficientMatrix) -> Affinity {
    let abs = c.values().abs();
    let mut a = &abs + abs.transpose();
    a.fill_diagonal(0.0);
    Affinity(a)
}

/// Zero-degree vertices get a zero `D^{-1/2}` entry, which leaves an
/// identity row in `L`.
pub fn normalized_laplacian(a: &Affinity) -> LaplacianMatrix {
    let n = a.0.nrows();
    let inv_sqrt: Vec<f64> = a
        .degrees()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let off = inv_sqrt[i] * a.0[(i, j)] * inv_sqrt[j];
            l[(i, j)] = if i == j { 1.0 - off } else { -off };
        }
    }
    // Exact symmetry regardless of rounding in the products above.
    let l = (&l + l.transpose()) * 0.5;
    LaplacianMatrix(l)
}

/// Eigenvalues and the column-orthonormal eigenvectors of the `n` smallest
/// eigenvalues of `L` (before any row normalization).
pub fn eigenbasis(l: &LaplacianMatrix, n: usize) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if n == 0 || n > l.0.nrows() {
        return Err(Error::InvalidConfig(format!(
            "embedding dimension {n} must lie in 1..={}",
            l.0.nrows()
        )));
    }
    smallest_eigenvectors(&l.0, n)
}

/// Eigenvectors of the `n` smallest eigenvalues with rows scaled to unit norm.
pub fn spectral_embedding(l: &LaplacianMatrix, n: usize) -> Result<SpectralEmbedding> {
    let (_, u) = eigenbasis(l, n)?;
    Ok(SpectralEmbedding::from_unnormalized(u))
}

/// Everything the pipeline keeps about one coefficient matrix.
#[derive(Debug, Clone)]
pub struct SpectralAnalysis {
    pub affinity: Affinity,
    pub laplacian: LaplacianMatrix,
    pub eigenvalues: DVector<f64>,
    /// Column-orthonormal eigenvectors, not row-normalized.
    pub basis: DMatrix<f64>,
    pub embedding: SpectralEmbedding,
}

pub fn analyze(c: &CoefficientMatrix, n: usize) -> Result<SpectralAnalysis> {
    let affinity = symmetrize(c);
    let laplacian = normalized_laplacian(&affinity);
    let (eigenvalues, basis) = eigenbasis(&laplacian, n)?;
    let embedding = SpectralEmbedding::from_unnormalized(basis.clone());
    Ok(SpectralAnalysis {
        affinity,
        laplacian,
        eigenvalues,
        basis,
        embedding,
    })
}

/// k-means on the rows of an embedding.
pub fn cluster_embedding(v: &SpectralEmbedding, k: usize, seed: u64) -> Result<KMeansResult> {
    kmeans(v.values(), k, seed)
}

/// symmetrize → normalized Laplacian → embedding → k-means.
pub fn spectral_cluster(c: &CoefficientMatrix, n: usize, seed: u64) -> Result<Vec<usize>> {
    let analysis = analyze(c, n)?;
    Ok(cluster_embedding(&analysis.embedding, n, seed)?.labels)
}

/// Two-dimensional coordinates from the eigenvectors of the second and
/// third smallest eigenvalues, rows normalized, for scatter plots.
pub fn embedding_2d(c: &CoefficientMatrix) -> Result<DMatrix<f64>> {
    let n = c.len();
    if n < 3 {
        return Err(Error::TooFewSamples(n));
    }
    let l = normalized_laplacian(&symmetrize(c));
    let (_, u) = smallest_eigenvectors(l.values(), 3)?;
    let xy = u.columns(1, 2).clone_owned();
    Ok(SpectralEmbedding::from_unnormalized(xy).values().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn symmetrize_cases() {
        let c = CoefficientMatrix::new(dmatrix![0.0, 2.0; -3.0, 0.0]).unwrap();
        assert_eq!(symmetrize(&c).values(), &dmatrix![0.0, 5.0; 5.0, 0.0]);
        let s = CoefficientMatrix::new(dmatrix![0.0, 1.5; 1.5, 0.0]).unwrap();
        assert_eq!(symmetrize(&s).values(), &(s.values() * 2.0));
    }

    #[test]
    fn two_vertex_laplacian() {
        let c = CoefficientMatrix::new(dmatrix![0.0, 0.5; 0.5, 0.0]).unwrap();
        let l = normalized_laplacian(&symmetrize(&c));
        assert!((l.values() - dmatrix![1.0, -1.0; -1.0, 1.0]).abs().max() < 1e-15);
    }

    #[test]
    fn isolated_vertex_gets_identity_row() {
        let c = CoefficientMatrix::new(dmatrix![0.0, 1.0, 0.0; 1.0, 0.0, 0.0; 0.0, 0.0, 0.0]).unwrap();
        let l = normalized_laplacian(&symmetrize(&c));
        assert_eq!(l.values().row(2).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.0, 1.0]);
    }

    fn two_cliques() -> CoefficientMatrix {
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 1.0;
        m[(2, 3)] = 2.0;
        m[(3, 2)] = 2.0;
        CoefficientMatrix::new(m).unwrap()
    }

    #[test]
    fn components_give_null_space() {
        let a = analyze(&two_cliques(), 4).unwrap();
        assert!(a.eigenvalues[0].abs() < 1e-12);
        assert!(a.eigenvalues[1].abs() < 1e-12);
        assert!(a.eigenvalues[2] > 0.5);
        let v = spectral_embedding(&a.laplacian, 2).unwrap();
        let r = v.values();
        assert!((r.row(0) - r.row(1)).norm() < 1e-10);
        assert!((r.row(2) - r.row(3)).norm() < 1e-10);
        assert!((r.row(0) - r.row(2)).norm() > 1.0);
    }

    #[test]
    fn full_basis_trace() {
        let a = analyze(&two_cliques(), 4).unwrap();
        let vvt = &a.basis * a.basis.transpose();
        assert!((vvt.trace() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn clusters_block_matrix() {
        let labels = spectral_cluster(&two_cliques(), 2, 0).unwrap();
        assert_eq!(labels[0], labels[1]);
        assert_eq!(labels[2], labels[3]);
        assert_ne!(labels[0], labels[2]);
    }
}
