//! Volumes of compatible regions: closed form, induction recursion and Monte Carlo.

use clpp::analytics::{induction_entropy, mc_volume, vol_entropy, vol_holder, Region};

fn main() -> clpp::Result<()> {
    println!("vol_entropy(k=1, t=1, B=1; a=2, b=1) = {}", vol_entropy(1, 1.0, 1.0, 2.0, 1.0)?.exp());
    for k in [2, 3] {
        let exact = vol_entropy(k, 1.0, 1.0, 2.0, 1.0)?.exp();
        let ind = induction_entropy(k, 1.0, 1.0, 2.0, 1.0)?;
        let region = Region::Entropy { k, t: 1.0, budget: 1.0, a: 2.0, b: 1.0 };
        let mc = mc_volume(&region, 1_000_000, 9)?;
        println!("k = {k}: closed {exact:.6}, induction {ind:.6}, MC {:.6} +/- {:.6}", mc.estimate, mc.stderr);
    }
    let big = vol_holder(400, 1.0, 1.0, 1.0)?;
    println!("ln vol_holder(k = 400) = {:.3}", big.ln);
    Ok(())
}
