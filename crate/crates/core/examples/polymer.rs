//! Energy–entropy problems: the directed polymer and the heavy-tailed field.

use clpp::model::{sample_heavy_tail_field, sample_poisson_strip};
use clpp::solvers::{solve_heavy_tail_anneal, solve_polymer_directed, AnnealConfig};

fn main() -> clpp::Result<()> {
    let t = 40.0;
    let strip = sample_poisson_strip(1.0, t, 8.0, 5)?;
    for beta in [0.5, 1.0, 2.0] {
        let z = solve_polymer_directed(&strip, beta, 2.0, 1.0, t)?;
        println!("beta {beta}: Z = {:.3}, {} points, entropy {:.3}", z.value, z.chain.len(), z.entropy);
    }

    let field = sample_heavy_tail_field(1.5, 3.0, 0.2, 6)?;
    let cfg = AnnealConfig { restarts: 2, ..AnnealConfig::with_seed(6) };
    let sol = solve_heavy_tail_anneal(&field, 1.0, 2.0, &cfg)?;
    println!("heavy tail ({} points): T >= {:.3}", field.len(), sol.value);
    Ok(())
}
