//! ACC / NMI / ARI on hand-made labelings.
//!
//!     cargo run --example clustering_metrics

use lgssc::metrics::score;

fn main() -> lgssc::Result<()> {
    let truth = [0, 0, 0, 1, 1, 1, 2, 2, 2];
    let cases: [(&str, [usize; 9]); 4] = [
        ("identical", truth),
        ("relabelled", [2, 2, 2, 0, 0, 0, 1, 1, 1]),
        ("one mistake", [0, 0, 1, 1, 1, 1, 2, 2, 2]),
        ("all one cluster", [0; 9]),
    ];
    for (name, pred) in cases {
        let s = score(&pred, &truth)?;
        println!("{name:16} acc {:6.2} nmi {:6.2} ari {:7.2}", s.acc, s.nmi, s.ari);
    }
    Ok(())
}
