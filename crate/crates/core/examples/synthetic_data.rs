//! Union-of-subspaces generation and contiguous occlusion.
//!
//!     cargo run --example synthetic_data

use lgssc::synth::{corrupt_with_indices, generate, CorruptionSpec, Fill, SubspaceSpec};

fn main() -> lgssc::Result<()> {
    let spec = SubspaceSpec {
        ambient_dim: 16,
        subspace_dims: vec![3, 3],
        points_per_subspace: 5,
        noise_sigma: 0.0,
        shared_basis: 1,
        seed: 0,
    };
    let g = generate(&spec, 4, 4)?;
    println!("clean: D={} N={} labels={:?}", g.dim(), g.len(), g.labels().unwrap());

    let occ = CorruptionSpec::quadrant_occlusion_with(4, 4, 0.4, Fill::Constant(1.0), 7);
    let (bad, hit) = corrupt_with_indices(&g, &occ)?;
    println!("occluded samples: {hit:?}");
    let j = hit[0];
    println!("sample {j} before / after (4x4, row-major):");
    for r in 0..4 {
        let row = |m: &nalgebra::DMatrix<f64>| (0..4).map(|c| format!("{:+.2}", m[(r * 4 + c, j)])).collect::<Vec<_>>().join(" ");
        println!("  {}   |   {}", row(g.data()), row(bad.data()));
    }
    Ok(())
}
