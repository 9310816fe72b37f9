//! Building an experiment from a preset, tweaking it, and writing outputs.
//!
//!     cargo run --release --example experiment_config -- /tmp/lgssc-run

use lgssc::experiment::{preset, run_experiment, PRESETS};

fn main() -> lgssc::Result<()> {
    println!("presets: {}", PRESETS.join(", "));
    let mut cfg = preset("synthetic")?;
    cfg.output_dir = std::env::args().nth(1).unwrap_or_else(|| "lgssc-run".into()).into();
    cfg.solver.seed = 11;
    cfg.emit.embedding_2d = true;
    cfg.emit.coefficient_matrix = true;
    cfg.validate()?;
    println!("{}", serde_json::to_string_pretty(&cfg.solver)?);

    let outcome = run_experiment(&cfg)?;
    println!("primary acc: {:?}", outcome.report.acc);
    for path in &outcome.written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
