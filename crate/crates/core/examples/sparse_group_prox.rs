//! The composed soft-threshold / block-threshold operator on one vector.
//!
//!     cargo run --example sparse_group_prox

use lgssc::prox::{block_threshold, soft_threshold, sparse_group_prox};

fn main() -> lgssc::Result<()> {
    let v = [3.0, -0.4, 1.2, -2.5];
    let w = [0.5, 0.5, 2.0, 0.5];
    let rho = 1.0;

    let soft: Vec<f64> = v.iter().zip(&w).map(|(&x, &t)| soft_threshold(x, t)).collect();
    println!("input           {v:?}");
    println!("soft threshold  {soft:?}");
    println!("then block      {:?}", block_threshold(&soft, rho));
    println!("composed prox   {:?}", sparse_group_prox(&v, &w, rho)?);

    // A large enough block weight kills the whole group.
    println!("rho = 10        {:?}", sparse_group_prox(&v, &w, 10.0)?);
    Ok(())
}
