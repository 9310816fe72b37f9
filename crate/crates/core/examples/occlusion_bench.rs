//! Paired SSC / LG-SSC benchmark over seeds, written as CSV to stdout.
//!
//!     SUBSPACE_THREADS=4 cargo run --release --example occlusion_bench

use lgssc::experiment::{init_thread_pool, preset, run_bench, write_bench_csv};

fn main() -> lgssc::Result<()> {
    init_thread_pool()?;
    let cfg = preset("occlusion")?;
    let seeds: Vec<u64> = (0..8).collect();
    let summary = run_bench(cfg.dataset.as_ref().unwrap(), &cfg.solver, &seeds)?;
    write_bench_csv(&summary, std::io::stdout().lock())?;
    eprintln!(
        "median acc: ssc {:.2}, lgssc {:.2}, gain {:+.2}",
        summary.median_ssc_acc, summary.median_lgssc_acc, summary.median_acc_gain
    );
    Ok(())
}
