//! Plain and guided ADMM solves on a small union of subspaces.
//!
//!     cargo run --example admm_solver

use nalgebra::DMatrix;

use lgssc::solver::{compute_mu, solve, GuidedProblem};
use lgssc::synth::{generate, SubspaceSpec};
use lgssc::{SideInfo, SolverConfig};

fn main() -> lgssc::Result<()> {
    let spec = SubspaceSpec {
        ambient_dim: 20,
        subspace_dims: vec![2, 2],
        points_per_subspace: 6,
        noise_sigma: 0.0,
        shared_basis: 0,
        seed: 1,
    };
    let g = generate(&spec, 4, 5)?;
    let x = g.data().clone();
    let mu = compute_mu(&x, 20.0)?;
    let cfg = SolverConfig::default();

    let plain = solve(&GuidedProblem::plain(x.clone(), mu, mu), &cfg)?;
    println!(
        "plain:  {:?} after {} iterations, residual {:.2e}",
        plain.status,
        plain.state.iteration,
        plain.final_relative_residual()
    );

    // Penalize cross-subspace links and group each half; Θ would normally
    // come from a fused children embedding.
    let n = x.ncols();
    let theta = DMatrix::from_fn(n, n, |i, j| if i / 6 == j / 6 { 0.0 } else { 1.0 });
    let side = SideInfo::new(theta, vec![(0..6).collect(), (6..12).collect()])?;
    let guided = solve(&GuidedProblem::guided(x, &side, 1.0, 0.5, mu, mu), &cfg)?;
    println!(
        "guided: {:?} after {} iterations, residual {:.2e}",
        guided.status,
        guided.state.iteration,
        guided.final_relative_residual()
    );

    let c = guided.coefficients().values();
    let cross: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| i / 6 != j / 6)
        .map(|(i, j)| c[(i, j)].abs())
        .sum();
    println!("cross-subspace ℓ1 mass: {cross:.3e} of {:.3}", c.abs().sum());
    Ok(())
}
