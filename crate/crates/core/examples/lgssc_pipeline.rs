//! Full bottom-up pipeline vs the SSC baseline on occluded synthetic images.
//!
//!     cargo run --release --example lgssc_pipeline

use lgssc::experiment::{occlusion_benchmark_source, preset};
use lgssc::metrics::score;
use lgssc::{run_lgssc, run_ssc_baseline};

fn main() -> lgssc::Result<()> {
    let gallery = occlusion_benchmark_source(2).load()?;
    let truth = gallery.labels().unwrap().to_vec();
    let solver = preset("occlusion")?.solver;

    let ssc = run_ssc_baseline(&gallery, &solver)?;
    let lg = run_lgssc(&gallery, &solver)?;
    let (a, b) = (score(&ssc.labels, &truth)?, score(&lg.labels, &truth)?);
    println!("ssc:   acc {:6.2} nmi {:6.2} ari {:6.2}", a.acc, a.nmi, a.ari);
    println!("lgssc: acc {:6.2} nmi {:6.2} ari {:6.2}", b.acc, b.nmi, b.ari);

    for d in &lg.diagnostics {
        println!(
            "node L{} #{} {}x{} guided={} iters={} residual={:.1e}",
            d.level, d.index, d.patch_height, d.patch_width, d.guided, d.solve.iterations, d.solve.final_relative_residual
        );
    }
    Ok(())
}
