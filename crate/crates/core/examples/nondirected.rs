//! Non-directed entropy LPP: Held–Karp on a small disk, annealing on a large one.

use clpp::constraints::ConstraintSpec;
use clpp::model::sample_uniform_disk;
use clpp::solvers::{solve_nondir_anneal, solve_nondir_heldkarp, AnnealConfig};

fn main() -> clpp::Result<()> {
    let spec = ConstraintSpec::NonDirEntropy { a: 2.0, b: 1.0, budget: 1.0, t: 1.0 };
    let small = sample_uniform_disk(16, 1.0, 2)?;
    let exact = solve_nondir_heldkarp(&small, &spec)?;
    let heur = solve_nondir_anneal(&small, &spec, &AnnealConfig::with_seed(2))?;
    println!("m = 16: Held-Karp {}, anneal {}", exact.cardinality, heur.cardinality);

    let big = sample_uniform_disk(2048, 1.0, 3)?;
    let cfg = AnnealConfig { restarts: 2, ..AnnealConfig::with_seed(3) };
    let sol = solve_nondir_anneal(&big, &spec, &cfg)?;
    println!("m = 2048: anneal lower bound {}", sol.cardinality);
    Ok(())
}
