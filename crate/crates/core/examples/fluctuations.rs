//! Fluctuations of point-to-point LPP against the Tracy–Widom GUE law.

use clpp::constraints::ConstraintSpec;
use clpp::experiments::{fluctuation_study, svg_histogram, Problem, ReplicaPlan, Sampling, SolverChoice, TwTable, DEFAULT_TW_TABLE};

fn main() -> clpp::Result<()> {
    let table = TwTable::load(DEFAULT_TW_TABLE)?;
    let plan = ReplicaPlan {
        problem: Problem::Lpp { spec: ConstraintSpec::Holder { gamma: 0.0, a_max: 1.0 }, point_to_point: true },
        sampling: Sampling::Poisson { lambda: 1.0, t: 200.0, window: 35.0 },
        solver: SolverChoice::Exact,
        replicas: 500,
        seed: 8,
        jobs: None,
    };
    let r = fluctuation_study(&plan, &table, DEFAULT_TW_TABLE)?;
    println!("mean L/t {:.4}; C {:.4}, c {:.4}", r.mean_over_t, r.big_c_hat, r.c_hat);
    println!("skewness {:.3} (TW {:.3}), KS distance {:.4}", r.moments.skewness, r.tw_skewness, r.ks_distance);
    let path = std::env::temp_dir().join("clpp-fluct.svg");
    let svg = svg_histogram(&r.histogram, r.values.len(), Some(&table));
    std::fs::write(&path, svg).map_err(|e| clpp::Error::Io { path: path.display().to_string(), source: e })?;
    println!("histogram: {}", path.display());
    Ok(())
}
