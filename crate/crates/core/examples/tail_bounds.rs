//! Empirical tail probabilities of L against the first-moment and box bounds.

use clpp::constraints::ConstraintSpec;
use clpp::experiments::verify_tail_bounds;

fn main() -> clpp::Result<()> {
    let spec = ConstraintSpec::Entropy { a: 2.0, b: 1.0, budget: 1.0 };
    let r = verify_tail_bounds(&spec, 200, 1.0, 1.0, &[16, 20, 24, 28, 32, 36, 40], 500, 1)?;
    println!("   k   P(L>=k)   bound     P(L<=k)   bound");
    for c in &r.checks {
        let le = c.bound_le.map_or("-".to_string(), |b| format!("{b:.3e}"));
        println!("{:4}   {:.4}   {:.3e}   {:.4}   {le}", c.k, c.p_ge, c.bound_ge, c.p_le);
    }
    println!("all checks pass: {}", r.passed);
    Ok(())
}
