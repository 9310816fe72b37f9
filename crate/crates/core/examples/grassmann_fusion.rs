//! Fusing several noisy views of the same cluster graph into one embedding,
//! then turning it into penalty weights and groups.
//!
//!     cargo run --example grassmann_fusion

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lgssc::fusion::{build_side_info, fuse, fused_basis, fusion_objective, FusionInput};
use lgssc::spectral::analyze;
use lgssc::CoefficientMatrix;

fn view(rng: &mut ChaCha8Rng) -> CoefficientMatrix {
    // Two blocks of 6; each view gets random cross-talk.
    let m = DMatrix::from_fn(12, 12, |i, j| {
        if i / 6 == j / 6 {
            rng.random_range(0.3..1.0)
        } else {
            rng.random_range(0.0..0.3)
        }
    });
    CoefficientMatrix::from_zeroed_diagonal(m).unwrap()
}

fn main() -> lgssc::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let views: Vec<_> = (0..4).map(|_| analyze(&view(&mut rng), 2)).collect::<lgssc::Result<_>>()?;
    let input = FusionInput::new(
        views.iter().map(|a| a.laplacian.values().clone()).collect(),
        views.iter().map(|a| a.basis.clone()).collect(),
        20.0,
    )?;

    let v = fused_basis(&input, 2)?;
    println!("fusion objective at the fused basis: {:.4}", fusion_objective(&input, &v));
    for (k, a) in views.iter().enumerate() {
        println!("  ... at view {k}'s own basis:      {:.4}", fusion_objective(&input, &a.basis));
    }

    let built = build_side_info(&fuse(&input, 2)?, 2, 0.8, 0)?;
    println!("groups: {:?}", built.side_info.groups());
    let theta = built.side_info.theta();
    println!("Θ(0,1) = {:.3} (same block), Θ(0,11) = {:.3} (across)", theta[(0, 1)], theta[(0, 11)]);
    Ok(())
}
