//! Two-sample KS checks of the intensity and temperature scaling identities.

use clpp::experiments::{check_scaling_distribution, ScalingPair};

fn main() -> clpp::Result<()> {
    let pairs = [
        ScalingPair::HolderIntensity { gamma: 1.0, a_max: 1.0, lambda: 4.0, t: 25.0, window: 12.5 },
        ScalingPair::Polymer { a: 2.0, b: 1.0, beta: 2.0, t: 10.0, window: 3.0 },
    ];
    for pair in pairs {
        let r = check_scaling_distribution(&pair, 300, 4)?;
        println!("{pair:?}\n  D = {:.4}, p = {:.3}", r.ks.statistic, r.ks.p_value);
    }
    Ok(())
}
