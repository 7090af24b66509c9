//! Shadow-feature selection on the 20-feature benchmark, where only the first
//! five continuous features and one categorical feature carry signal.

use cast_core::classifier::gbdt::GbdtParams;
use cast_core::data::make_split;
use cast_core::data::synthetic::Bundled;
use cast_core::selection::{select_features, DEFAULT_REPEATS};

fn main() -> cast_core::Result<()> {
    let ds = Bundled::Informative20.generate(1000, 2024)?;
    let split = make_split(&ds, 0.2, 0)?;
    let labeled = ds.subset(&split.folds[0].labeled);
    let res = select_features(&labeled, DEFAULT_REPEATS, 7, &GbdtParams::default())?;
    for (i, f) in ds.schema().iter().enumerate() {
        let mark = if res.selected_idx.contains(&i) { "*" } else { " " };
        println!(
            "{mark} {:<6} hits {:>2}/{}  mean importance {:.4}",
            f.name, res.hit_counts[i], res.repeats, res.mean_importance[i]
        );
    }
    if res.used_fallback {
        println!("no feature beat its shadows often enough; kept the top features by importance");
    }
    Ok(())
}
