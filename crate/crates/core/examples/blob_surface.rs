//! Confidence surfaces over a blob pair with and without the density prior.
//! Writes `grid.csv` and `labeled.csv` to the directory given as the first
//! argument (default: a temp dir) and prints a coarse text map of the gap.

use std::path::PathBuf;

use cast_core::theory::{blob_surface, BlobConfig};

fn main() -> cast_core::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("cast-blob"));
    let s = blob_surface(&BlobConfig {
        resolution: 25,
        ..BlobConfig::default()
    })?;
    s.write_csv(&out)?;

    // darker glyph = larger drop from raw to regularized confidence
    let glyphs = [' ', '.', ':', '-', '=', '+', '*', '#'];
    for iy in (0..s.ys.len()).rev() {
        let line: String = (0..s.xs.len())
            .map(|ix| {
                let i = s.index(ix, iy);
                let drop = (s.naive[i] - s.cast[i]) / s.naive[i].max(1e-12);
                glyphs[((drop / s.alpha) * (glyphs.len() - 1) as f64).round().clamp(0.0, 7.0) as usize]
            })
            .collect();
        println!("{line}");
    }
    println!("written to {}", out.display());
    Ok(())
}
