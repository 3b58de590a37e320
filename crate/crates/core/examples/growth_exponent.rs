//! Log-log growth exponent of E[L_m] in the unit box.

use clpp::constraints::ConstraintSpec;
use clpp::experiments::{exponent_fit, SolverChoice};

fn main() -> clpp::Result<()> {
    let ms = [128, 256, 512, 1024, 2048];
    for spec in [
        ConstraintSpec::Holder { gamma: 1.0, a_max: 1.0 },
        ConstraintSpec::Entropy { a: 2.0, b: 0.0, budget: 1.0 },
    ] {
        let r = exponent_fit(&spec, &ms, 4, 2, &SolverChoice::Exact)?;
        println!("{spec:?}: slope {:.3}, predicted {:.3}", r.fit.slope, r.predicted);
    }
    Ok(())
}
