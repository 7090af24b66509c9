//! Information carried by unlabeled samples in dense and sparse regions of a
//! two-Gaussian mixture, and how it shrinks with class overlap.

use cast_core::theory::{corollary_check, fisher_information, MixtureSpec, Region};

fn main() -> cast_core::Result<()> {
    let rep = corollary_check(&MixtureSpec::gaussians(0.0, 4.0, 1.0, 0.5))?;
    println!(
        "thresholds high {:.4} / low {:.4}",
        rep.theta_high, rep.theta_low
    );
    println!("I_all {:.6}  I_high {:.6}  I_low {:.6}  holds: {}", rep.i_all, rep.i_high, rep.i_low, rep.holds);
    println!(
        "max min(D1, D2) on high region {:.2e}, max |D1 - D2| on low region {:.2e}",
        rep.high_region_max_min_density, rep.low_region_max_abs_diff
    );

    println!("\nmean gap   I_all     I_high    I_low");
    for gap in [0.5, 1.0, 2.0, 4.0, 6.0] {
        let spec = MixtureSpec::gaussians(0.0, gap, 1.0, 0.5);
        println!(
            "{gap:>8.1}   {:.5}   {:.5}   {:.5}",
            fisher_information(&spec, Region::All)?,
            fisher_information(&spec, Region::High)?,
            fisher_information(&spec, Region::Low)?
        );
    }
    Ok(())
}
