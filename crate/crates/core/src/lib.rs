//! Locally-guided sparse subspace clustering.
//!
//! Samples (vectorized images) are split top-down into a hierarchy of
//! patches. Bottom-up, every patch gallery gets a sparse self-expressive
//! representation; the spectral embeddings of sibling patches are merged on
//! the Grassmann manifold and the merged embedding guides the parent solve
//! through a cannot-link penalty matrix and recommended-link groups (a
//! weighted sparse group lasso, optimized by ADMM). The root coefficient
//! matrix is clustered spectrally.
//!
//! Module map:
//!
//! * [`data`]: galleries, coefficient matrices, embeddings, side information, configuration
//! * [`prox`]: soft/block thresholding and the composed sparse-group-lasso prox
//! * [`solver`]: the ADMM self-expressive solver
//! * [`spectral`] and [`kmeans`]: affinity, normalized Laplacian, embedding, clustering
//! * [`fusion`]: summary Laplacian, fused embedding, spectral kernel, side information
//! * [`hierarchy`]: the patch hierarchy and patch gallery extraction
//! * [`pipeline`]: plain SSC baseline and the full locally-guided pipeline
//! * [`metrics`]: ACC / NMI / ARI
//! * [`synth`]: union-of-subspaces generator and corruption models
//! * [`io`] and [`experiment`]: file formats, presets, experiment driver

pub mod data;
pub mod error;
pub mod experiment;
pub mod fusion;
pub mod hierarchy;
pub mod io;
pub mod kmeans;
pub mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod prox;
pub mod solver;
pub mod spectral;
pub mod synth;

pub use data::{
    normalize_columns, validate_gallery, CoefficientMatrix, DataGallery, Guidance, SideInfo,
    SolverConfig, SpectralEmbedding,
};
pub use error::{Error, Result};
pub use pipeline::{run_lgssc, run_ssc_baseline, LgsscOutput, SscOutput};
