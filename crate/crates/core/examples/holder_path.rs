//! Exact point-to-point Hölder LPP on one strip, with an SVG of the optimiser.

use clpp::constraints::{is_compatible, ConstraintSpec};
use clpp::experiments::svg_path_plot;
use clpp::model::sample_poisson_strip;
use clpp::solvers::solve_holder_exact;

fn main() -> clpp::Result<()> {
    let t = 200.0;
    let cloud = sample_poisson_strip(1.0, t, t / 2.0, 1)?;
    for gamma in [0.0, 0.5, 1.0, 2.0] {
        let sol = solve_holder_exact(&cloud, gamma, 1.0, Some(t))?;
        let spec = ConstraintSpec::Holder { gamma, a_max: 1.0 };
        let ok = is_compatible(&cloud, &sol.chain, &spec)?.compatible;
        println!("gamma {gamma}: L = {} (L/t = {:.3}), compatible {ok}", sol.cardinality, sol.cardinality as f64 / t);
        if gamma == 1.0 {
            let svg = svg_path_plot(&cloud, &sol.chain)?;
            let path = std::env::temp_dir().join("clpp-holder-path.svg");
            std::fs::write(&path, svg).map_err(|e| clpp::Error::Io { path: path.display().to_string(), source: e })?;
            println!("path plot: {}", path.display());
        }
    }
    Ok(())
}
