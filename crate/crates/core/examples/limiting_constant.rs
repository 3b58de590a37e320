//! Limiting constant of point-to-point Hölder LPP, with a super-additivity check.

use clpp::constraints::ConstraintSpec;
use clpp::experiments::{estimate_constant, superadditivity_check, Problem, ReplicaPlan, Sampling, SolverChoice};

fn main() -> clpp::Result<()> {
    let plan = ReplicaPlan {
        problem: Problem::Lpp { spec: ConstraintSpec::Holder { gamma: 1.0, a_max: 1.0 }, point_to_point: true },
        sampling: Sampling::Poisson { lambda: 1.0, t: 100.0, window: 50.0 },
        solver: SolverChoice::Exact,
        replicas: 40,
        seed: 3,
        jobs: None,
    };
    let r = estimate_constant(&plan)?;
    println!("L(t)/t = {:.4} +/- {:.4}", r.estimate, r.stderr.unwrap_or(f64::NAN));
    if let Some(c) = r.conjecture {
        println!("conjectured curve {:.4}", c.value);
    }
    let s = superadditivity_check(&plan, 2.0)?;
    println!("t: {:.4}, 2t: {:.4}, holds: {}", s.short.estimate, s.long.estimate, s.passed);
    Ok(())
}
