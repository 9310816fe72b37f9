//! Writing and reading a gallery as CSV, binary and a PGM directory.
//!
//!     cargo run --example gallery_formats -- /tmp/galleries

use std::fs;
use std::path::PathBuf;

use lgssc::io::{load_gallery, save_binary, save_csv, write_pgm, GalleryFormat, PgmImage};
use lgssc::synth::{generate, SubspaceSpec};

fn main() -> lgssc::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "gallery-formats".into()));
    fs::create_dir_all(dir.join("pgm"))?;
    let spec = SubspaceSpec {
        ambient_dim: 64,
        subspace_dims: vec![4, 4],
        points_per_subspace: 5,
        noise_sigma: 0.0,
        shared_basis: 0,
        seed: 9,
    };
    let g = generate(&spec, 8, 8)?;

    save_csv(&g, &dir.join("g.csv"))?;
    save_binary(&g, &dir.join("g.bin"))?;

    // PGM stores 8-bit intensities, so scale each image to 0..=255.
    let mut labels = String::from("filename,label\n");
    for (j, col) in g.data().column_iter().enumerate() {
        let (lo, hi) = (col.min(), col.max());
        let pixels = col.iter().map(|&v| ((v - lo) / (hi - lo) * 255.0).round() as u8).collect();
        let name = format!("img{j:02}.pgm");
        write_pgm(&PgmImage { width: 8, height: 8, maxval: 255, pixels }, &dir.join("pgm").join(&name))?;
        labels += &format!("{name},{}\n", g.labels().unwrap()[j]);
    }
    fs::write(dir.join("pgm").join("labels.csv"), labels)?;

    for name in ["g.csv", "g.bin", "pgm"] {
        let path = dir.join(name);
        let format = GalleryFormat::detect(&path);
        let back = load_gallery(&path, format)?;
        let summary = format!("{name:6} {format:?}: D={} N={} labels={}", back.dim(), back.len(), back.labels().is_some());
        if format == GalleryFormat::PgmDir {
            // 8-bit intensities scaled to [0, 1]; not the original values.
            println!("{summary} range [{:.2}, {:.2}]", back.data().min(), back.data().max());
        } else {
            println!("{summary} max |Δ|={:.1e}", (back.data() - g.data()).amax());
        }
    }
    Ok(())
}
