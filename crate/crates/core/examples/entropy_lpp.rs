//! Entropy-constrained LPP: free endpoint in a box, and point-to-point with budget B t.

use clpp::model::{sample_poisson_strip, sample_uniform_box};
use clpp::solvers::solve_entropy_exact;

fn main() -> clpp::Result<()> {
    let cloud = sample_uniform_box(2000, 1.0, 1.0, 3)?;
    for (a, b) in [(2.0, 1.0), (1.0, 0.0), (2.0, 0.0)] {
        let sol = solve_entropy_exact(&cloud, a, b, 1.0, None)?;
        println!("(a, b) = ({a}, {b}): L = {}, entropy used {:.4}", sol.cardinality, sol.achieved);
    }

    let t = 60.0;
    let strip = sample_poisson_strip(1.0, t, 15.0, 4)?;
    let sol = solve_entropy_exact(&strip, 2.0, 1.0, t, Some(t))?;
    println!("point-to-point (2, 1) at t = {t}: L/t = {:.3}", sol.cardinality as f64 / t);
    Ok(())
}
