//! Affinity → normalized Laplacian → embedding → k-means on a solved C.
//!
//!     cargo run --example spectral_clustering

use lgssc::metrics::score;
use lgssc::solver::{compute_mu, solve, GuidedProblem};
use lgssc::spectral::{analyze, cluster_embedding, embedding_2d};
use lgssc::synth::{generate, SubspaceSpec};
use lgssc::SolverConfig;

fn main() -> lgssc::Result<()> {
    let spec = SubspaceSpec {
        ambient_dim: 30,
        subspace_dims: vec![3, 3, 3],
        points_per_subspace: 15,
        noise_sigma: 0.01,
        shared_basis: 0,
        seed: 4,
    };
    let g = generate(&spec, 5, 6)?;
    let mu = compute_mu(g.data(), 20.0)?;
    let out = solve(&GuidedProblem::plain(g.data().clone(), mu, mu), &SolverConfig::default())?;

    let analysis = analyze(out.coefficients(), 3)?;
    let eig: Vec<String> = analysis.eigenvalues.iter().map(|v| format!("{:.4}", v.abs())).collect();
    println!("smallest Laplacian eigenvalues: {}", eig.join(", "));
    let km = cluster_embedding(&analysis.embedding, 3, 0)?;
    let s = score(&km.labels, g.labels().unwrap())?;
    println!("acc {:.2} nmi {:.2} ari {:.2}", s.acc, s.nmi, s.ari);

    // Scatter-plot coordinates from the 2nd and 3rd eigenvectors.
    let xy = embedding_2d(out.coefficients())?;
    println!("2-D embedding of sample 0: ({:+.3}, {:+.3})", xy[(0, 0)], xy[(0, 1)]);
    Ok(())
}
