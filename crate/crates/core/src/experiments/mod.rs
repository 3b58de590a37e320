//! Replica-based Monte Carlo studies.
//!
//! Every study is driven by a [`ReplicaPlan`]. Replica `r` samples its cloud
//! from `derive_seed(plan.seed, r)`, replicas run in parallel, and results are
//! gathered in index order, so reports are identical for any thread count.

mod fluct;
mod report;
mod scaling;
mod stats;

pub use fluct::{fluctuation_study, FluctuationReport, Histogram, TwTable, DEFAULT_TW_TABLE, MIN_FLUCT_REPLICAS};
pub use report::{svg_exponent_plot, svg_histogram, svg_path_plot, write_json, write_values_csv};
pub use scaling::{check_scaling_distribution, ScalingPair, ScalingReport, KS_PASS_LEVEL};
pub use stats::{fit_line, kolmogorov_survival, ks_two_sample, mean_stderr, KsTest, LineFit, Moments};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{
    conjectured_constant_holder, first_moment_bound, holder_constant_factor, lower_tail_bound, predicted_exponent,
    Conjecture,
};
use crate::constraints::{is_compatible, ConstraintSpec};
use crate::error::{Error, Result};
use crate::model::{
    sample_heavy_tail_field, sample_poisson_strip, sample_uniform_box, sample_uniform_disk, PointCloud,
};
use crate::rng::derive_seed;
use crate::solvers::{
    solve_entropy_exact, solve_heavy_tail_anneal, solve_holder_exact, solve_nondir_anneal, solve_nondir_heldkarp,
    solve_polymer_directed, AnnealConfig, LppSolution, HELD_KARP_CAP,
};

/// Version string echoed into every report.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// How each replica's cloud is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampling {
    /// `m` uniform points in `[0, t] x [-x, x]`.
    Uniform { m: usize, t: f64, x: f64 },
    /// Poisson points of intensity `lambda` in `[0, t] x [-window, window]`.
    Poisson { lambda: f64, t: f64, window: f64 },
    /// `m` uniform points in the disk of radius `r`.
    Disk { m: usize, r: f64 },
    /// Heavy-tailed weighted field in the disk of radius `radius`, weights `>= wmin`.
    HeavyTail { alpha: f64, radius: f64, wmin: f64 },
}

impl Sampling {
    pub fn sample(&self, seed: u64) -> Result<PointCloud> {
        match *self {
            Sampling::Uniform { m, t, x } => sample_uniform_box(m, t, x, seed),
            Sampling::Poisson { lambda, t, window } => sample_poisson_strip(lambda, t, window, seed),
            Sampling::Disk { m, r } => sample_uniform_disk(m, r, seed),
            Sampling::HeavyTail { alpha, radius, wmin } => sample_heavy_tail_field(alpha, radius, wmin, seed),
        }
    }

    pub fn horizon(&self) -> Option<f64> {
        match *self {
            Sampling::Uniform { t, .. } | Sampling::Poisson { t, .. } => Some(t),
            _ => None,
        }
    }

    fn is_directed(&self) -> bool {
        matches!(self, Sampling::Uniform { .. } | Sampling::Poisson { .. })
    }
}

/// What each replica computes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Problem {
    /// Largest compatible chain; point-to-point chains end at `(t, 0)`.
    Lpp { spec: ConstraintSpec, point_to_point: bool },
    /// Point-to-point directed polymer `sup beta |D| - Ent_{a,b}`.
    Polymer { beta: f64, a: f64, b: f64 },
    /// Non-directed heavy-tail problem `sup beta pi(s) - length(s)^nu`.
    HeavyTail { beta: f64, nu: f64 },
}

/// Solver selection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverChoice {
    /// Dynamic programming over directed clouds.
    Exact,
    /// Exact non-directed solver, up to `HELD_KARP_CAP` points.
    HeldKarp,
    /// Annealing; results are lower bounds.
    Anneal(AnnealConfig),
}

impl SolverChoice {
    pub fn is_heuristic(&self) -> bool {
        matches!(self, SolverChoice::Anneal(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicaPlan {
    pub problem: Problem,
    pub sampling: Sampling,
    pub solver: SolverChoice,
    pub replicas: u32,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool. Results do not depend on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

/// One replica's outcome.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicaValue {
    pub index: u32,
    pub seed: u64,
    pub points: usize,
    pub value: f64,
}

impl ReplicaPlan {
    /// Cloud seed of replica `r`.
    pub fn replica_seed(&self, r: u32) -> u64 {
        derive_seed(self.seed, r as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::Plan("at least one replica is required".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Plan("jobs must be positive".into()));
        }
        if let SolverChoice::Anneal(cfg) = &self.solver {
            cfg.validate()?;
        }
        let planar_size = match self.sampling {
            Sampling::Disk { m, .. } => Some(m),
            _ => None,
        };
        match (self.problem, self.solver) {
            (Problem::Lpp { spec, point_to_point }, solver) => {
                spec.validate()?;
                if spec.is_directed() {
                    if !self.sampling.is_directed() {
                        return Err(Error::Plan("directed constraints need box or strip sampling".into()));
                    }
                    if solver != SolverChoice::Exact {
                        return Err(Error::Plan(
                            "directed constraints are solved exactly; annealing and Held-Karp are planar only".into(),
                        ));
                    }
                } else {
                    if planar_size.is_none() {
                        return Err(Error::Plan("non-directed constraints need disk sampling".into()));
                    }
                    if point_to_point {
                        return Err(Error::Plan("non-directed paths have no terminal point".into()));
                    }
                    match solver {
                        SolverChoice::Exact => {
                            return Err(Error::Plan("use held_karp or anneal for non-directed constraints".into()))
                        }
                        SolverChoice::HeldKarp if planar_size > Some(HELD_KARP_CAP) => {
                            return Err(Error::Plan(format!(
                                "Held-Karp accepts at most {HELD_KARP_CAP} points; use anneal"
                            )))
                        }
                        _ => {}
                    }
                }
            }
            (Problem::Polymer { .. }, SolverChoice::Exact) if self.sampling.is_directed() => {}
            (Problem::Polymer { .. }, _) => {
                return Err(Error::Plan("the polymer problem needs directed sampling and the exact solver".into()))
            }
            (Problem::HeavyTail { .. }, SolverChoice::Anneal(_))
                if matches!(self.sampling, Sampling::HeavyTail { .. }) => {}
            (Problem::HeavyTail { .. }, _) => {
                return Err(Error::Plan("the heavy-tail problem needs a weighted field and annealing".into()))
            }
        }
        Ok(())
    }

    fn anneal_config(&self, replica_seed: u64) -> Option<AnnealConfig> {
        match self.solver {
            SolverChoice::Anneal(cfg) => Some(AnnealConfig {
                seed: derive_seed(cfg.seed ^ replica_seed, 1),
                ..cfg
            }),
            _ => None,
        }
    }

    /// Solves one sampled cloud and returns the full solution where the
    /// problem is an LPP.
    pub fn solve_cloud(&self, cloud: &PointCloud, replica_seed: u64) -> Result<(f64, Option<LppSolution>)> {
        let end = self.sampling.horizon();
        match self.problem {
            Problem::Lpp { spec, point_to_point } => {
                let endpoint = if point_to_point { end } else { None };
                let sol = match (spec, self.solver) {
                    (ConstraintSpec::Holder { gamma, a_max }, _) => solve_holder_exact(cloud, gamma, a_max, endpoint)?,
                    (ConstraintSpec::Entropy { a, b, budget }, _) => {
                        // point-to-point budgets grow linearly in t
                        let budget = if point_to_point { budget * end.unwrap_or(1.0) } else { budget };
                        solve_entropy_exact(cloud, a, b, budget, endpoint)?
                    }
                    (_, SolverChoice::HeldKarp) => solve_nondir_heldkarp(cloud, &spec)?,
                    (_, SolverChoice::Anneal(_)) => {
                        let cfg = self.anneal_config(replica_seed).expect("annealing plan");
                        solve_nondir_anneal(cloud, &spec, &cfg)?
                    }
                    (_, SolverChoice::Exact) => unreachable!("rejected by validate"),
                };
                Ok((sol.cardinality as f64, Some(sol)))
            }
            Problem::Polymer { beta, a, b } => {
                let t = end.expect("directed sampling has a horizon");
                Ok((solve_polymer_directed(cloud, beta, a, b, t)?.value, None))
            }
            Problem::HeavyTail { beta, nu } => {
                let cfg = self.anneal_config(replica_seed).expect("annealing plan");
                Ok((solve_heavy_tail_anneal(cloud, beta, nu, &cfg)?.value, None))
            }
        }
    }

    fn run_one(&self, r: u32) -> Result<ReplicaValue> {
        let seed = self.replica_seed(r);
        let cloud = self.sampling.sample(seed)?;
        let (value, _) = self.solve_cloud(&cloud, seed)?;
        Ok(ReplicaValue {
            index: r,
            seed,
            points: cloud.len(),
            value,
        })
    }
}

/// Runs every replica of `plan`, in index order.
pub fn run_replicas(plan: &ReplicaPlan) -> Result<Vec<ReplicaValue>> {
    plan.validate()?;
    let work = || {
        (0..plan.replicas)
            .into_par_iter()
            .map(|r| plan.run_one(r))
            .collect::<Result<Vec<_>>>()
    };
    match plan.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::Plan(format!("cannot build a thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Limiting-constant estimate from point-to-point replicas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub version: String,
    pub plan: ReplicaPlan,
    /// Per-replica `L(t) / t` (or `Z(t) / t`).
    pub values: Vec<ReplicaValue>,
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub replicas: u32,
    /// Annealed estimates only bound the constant from below.
    pub lower_bound: bool,
    /// Conjectured Hölder curve at the plan's `(lambda, A)`, never ground truth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjecture: Option<Conjecture>,
}

/// Mean of `L(t)/t` over replicas of a point-to-point plan.
pub fn estimate_constant(plan: &ReplicaPlan) -> Result<EstimateReport> {
    plan.validate()?;
    let (t, lambda) = match plan.sampling {
        Sampling::Poisson { t, lambda, .. } => (t, lambda),
        _ => return Err(Error::Plan("constants are estimated on Poisson strips".into())),
    };
    match plan.problem {
        Problem::Lpp { point_to_point: true, .. } | Problem::Polymer { .. } => {}
        _ => return Err(Error::Plan("estimate_constant needs a point-to-point problem".into())),
    }
    let mut values = run_replicas(plan)?;
    for v in &mut values {
        v.value /= t;
    }
    let xs: Vec<f64> = values.iter().map(|v| v.value).collect();
    let (estimate, stderr) = mean_stderr(&xs);
    let conjecture = match plan.problem {
        Problem::Lpp { spec: ConstraintSpec::Holder { gamma, a_max }, .. } => {
            let base = conjectured_constant_holder(gamma)?;
            Some(Conjecture {
                value: base.value * holder_constant_factor(lambda, a_max, gamma)?,
                ..base
            })
        }
        _ => None,
    };
    Ok(EstimateReport {
        version: CODE_VERSION.into(),
        plan: *plan,
        values,
        estimate,
        stderr,
        replicas: plan.replicas,
        lower_bound: plan.solver.is_heuristic(),
        conjecture,
    })
}

/// Agreement between annealing and Held–Karp on small clouds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub m: usize,
    pub instances: u32,
    pub agree: u32,
    /// Largest `exact - annealed` cardinality gap.
    pub max_gap: usize,
}

/// Runs annealing and Held–Karp on `instances` disks of `m` points.
pub fn anneal_cross_check(
    spec: &ConstraintSpec,
    m: usize,
    instances: u32,
    seed: u64,
    config: &AnnealConfig,
) -> Result<CrossCheck> {
    if m > HELD_KARP_CAP {
        return Err(Error::Plan(format!("cross-checks need m <= {HELD_KARP_CAP}")));
    }
    let gaps: Vec<usize> = (0..instances)
        .into_par_iter()
        .map(|r| {
            let s = derive_seed(seed, r as u64);
            let cloud = sample_uniform_disk(m, 1.0, s)?;
            let exact = solve_nondir_heldkarp(&cloud, spec)?.cardinality;
            let cfg = AnnealConfig { seed: derive_seed(s, 1), ..*config };
            let heur = solve_nondir_anneal(&cloud, spec, &cfg)?.cardinality;
            Ok(exact.saturating_sub(heur))
        })
        .collect::<Result<_>>()?;
    Ok(CrossCheck {
        m,
        instances,
        agree: gaps.iter().filter(|&&g| g == 0).count() as u32,
        max_gap: gaps.into_iter().max().unwrap_or(0),
    })
}

/// Log-log fit of `E[L_m]` against `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub version: String,
    pub spec: ConstraintSpec,
    pub solver: SolverChoice,
    pub seed: u64,
    pub replicas: u32,
    pub ms: Vec<usize>,
    pub means: Vec<f64>,
    pub stderrs: Vec<Option<f64>>,
    pub fit: LineFit,
    pub predicted: f64,
    pub lower_bound: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheck>,
}

impl ExponentReport {
    pub fn deviation(&self) -> f64 {
        self.fit.slope - self.predicted
    }
}

/// Directed specs use `m` uniform points in `[0,1] x [-1,1]`; non-directed
/// specs use the unit disk and, when annealed, add a Held–Karp cross-check
/// at `m = 14`.
pub fn exponent_fit(
    spec: &ConstraintSpec,
    ms: &[usize],
    replicas: u32,
    seed: u64,
    solver: &SolverChoice,
) -> Result<ExponentReport> {
    if ms.len() < 3 {
        return Err(Error::Plan("an exponent fit needs at least three sizes".into()));
    }
    if ms.contains(&0) {
        return Err(Error::Plan("sizes must be positive".into()));
    }
    let mut means = Vec::with_capacity(ms.len());
    let mut stderrs = Vec::with_capacity(ms.len());
    for (i, &m) in ms.iter().enumerate() {
        let sampling = if spec.is_directed() {
            Sampling::Uniform { m, t: 1.0, x: 1.0 }
        } else {
            Sampling::Disk { m, r: 1.0 }
        };
        let plan = ReplicaPlan {
            problem: Problem::Lpp { spec: *spec, point_to_point: false },
            sampling,
            solver: *solver,
            replicas,
            seed: derive_seed(seed, i as u64),
            jobs: None,
        };
        let xs: Vec<f64> = run_replicas(&plan)?.iter().map(|v| v.value).collect();
        let (mean, se) = mean_stderr(&xs);
        if mean <= 0.0 {
            return Err(Error::Degenerate(format!("E[L_m] is zero at m = {m}")));
        }
        means.push(mean);
        stderrs.push(se);
    }
    let lx: Vec<f64> = ms.iter().map(|&m| (m as f64).ln()).collect();
    let ly: Vec<f64> = means.iter().map(|v| v.ln()).collect();
    let fit = fit_line(&lx, &ly)?;
    let cross_check = match solver {
        SolverChoice::Anneal(cfg) if !spec.is_directed() => {
            Some(anneal_cross_check(spec, 14, replicas.max(10), derive_seed(seed, u64::MAX), cfg)?)
        }
        _ => None,
    };
    Ok(ExponentReport {
        version: CODE_VERSION.into(),
        spec: *spec,
        solver: *solver,
        seed,
        replicas,
        ms: ms.to_vec(),
        means,
        stderrs,
        fit,
        predicted: predicted_exponent(spec)?,
        lower_bound: solver.is_heuristic(),
        cross_check,
    })
}

/// Empirical tail probabilities at one `k` against the rigorous bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub k: usize,
    pub p_ge: f64,
    pub sigma_ge: f64,
    pub bound_ge: f64,
    pub ok_ge: bool,
    pub p_le: f64,
    pub sigma_le: f64,
    /// `None` where no explicit lower-tail bound exists.
    pub bound_le: Option<f64>,
    pub ok_le: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckReport {
    pub version: String,
    pub spec: ConstraintSpec,
    pub m: usize,
    pub t: f64,
    pub x: f64,
    pub replicas: u32,
    pub seed: u64,
    /// Replica count with `L = j` at position `j`.
    pub histogram: Vec<u32>,
    pub checks: Vec<TailCheck>,
    pub passed: bool,
}

/// Checks `P(L >= k) <= E[N_k] + 3 sigma` and `P(L <= k) <= lower-tail bound
/// + 3 sigma` for every `k` in `ks`, with `sigma` the binomial standard error.
///
/// Directed specs sample `m` points in `[0, t] x [-x, x]`; non-directed specs
/// sample the disk of radius `x` and need `m <= HELD_KARP_CAP`.
pub fn verify_tail_bounds(
    spec: &ConstraintSpec,
    m: usize,
    t: f64,
    x: f64,
    ks: &[usize],
    replicas: u32,
    seed: u64,
) -> Result<BoundCheckReport> {
    if let Some(&k) = ks.iter().find(|&&k| k > m) {
        return Err(Error::Plan(format!("k = {k} exceeds m = {m}")));
    }
    let (sampling, solver) = if spec.is_directed() {
        (Sampling::Uniform { m, t, x }, SolverChoice::Exact)
    } else {
        (Sampling::Disk { m, r: x }, SolverChoice::HeldKarp)
    };
    let plan = ReplicaPlan {
        problem: Problem::Lpp { spec: *spec, point_to_point: false },
        sampling,
        solver,
        replicas,
        seed,
        jobs: None,
    };
    let ls: Vec<usize> = run_replicas(&plan)?.iter().map(|v| v.value as usize).collect();
    let mut histogram = vec![0u32; m + 1];
    for &l in &ls {
        histogram[l] += 1;
    }
    let n = replicas as f64;
    let sigma = |p: f64| (p * (1.0 - p) / n).sqrt();
    let mut checks = Vec::with_capacity(ks.len());
    for &k in ks {
        let p_ge = ls.iter().filter(|&&l| l >= k).count() as f64 / n;
        let p_le = ls.iter().filter(|&&l| l <= k).count() as f64 / n;
        let bound_ge = if k == 0 { 1.0 } else { first_moment_bound(k, m as u64, t, x, spec)?.value };
        let bound_le = if !spec.is_directed() {
            None
        } else if k == 0 || k == m {
            Some(1.0)
        } else {
            Some(lower_tail_bound(k, m as u64, t, x, spec)?.value)
        };
        let (s_ge, s_le) = (sigma(p_ge), sigma(p_le));
        checks.push(TailCheck {
            k,
            p_ge,
            sigma_ge: s_ge,
            bound_ge,
            ok_ge: p_ge <= bound_ge + 3.0 * s_ge,
            p_le,
            sigma_le: s_le,
            bound_le,
            ok_le: bound_le.is_none_or(|b| p_le <= b + 3.0 * s_le),
        });
    }
    let passed = checks.iter().all(|c| c.ok_ge && c.ok_le);
    Ok(BoundCheckReport {
        version: CODE_VERSION.into(),
        spec: *spec,
        m,
        t,
        x,
        replicas,
        seed,
        histogram,
        checks,
        passed,
    })
}

/// `mean L(2t)/2t` against `mean L(t)/t` on independent replicas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperadditivityReport {
    pub short: EstimateReport,
    pub long: EstimateReport,
    pub joint_stderr: f64,
    pub passed: bool,
}

/// Runs `plan` at its horizon `t` and at `2t`, the window multiplied by
/// `window_factor`, and checks `long >= short - 3 joint stderr`.
pub fn superadditivity_check(plan: &ReplicaPlan, window_factor: f64) -> Result<SuperadditivityReport> {
    let Sampling::Poisson { lambda, t, window } = plan.sampling else {
        return Err(Error::Plan("the super-additivity check runs on Poisson strips".into()));
    };
    crate::error::require_positive("window factor", window_factor)?;
    let short = estimate_constant(plan)?;
    let long_plan = ReplicaPlan {
        sampling: Sampling::Poisson { lambda, t: 2.0 * t, window: window * window_factor },
        seed: derive_seed(plan.seed, u64::MAX),
        ..*plan
    };
    let long = estimate_constant(&long_plan)?;
    let joint_stderr = short.stderr.unwrap_or(0.0).hypot(long.stderr.unwrap_or(0.0));
    let passed = long.estimate >= short.estimate - 3.0 * joint_stderr;
    Ok(SuperadditivityReport { short, long, joint_stderr, passed })
}

/// One realisation with its optimiser.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleShot {
    pub cloud: PointCloud,
    pub solution: LppSolution,
    pub compatible: bool,
}

/// Samples and solves a single LPP instance of `plan` (replica 0).
pub fn single_shot(plan: &ReplicaPlan) -> Result<SingleShot> {
    plan.validate()?;
    let Problem::Lpp { spec, point_to_point } = plan.problem else {
        return Err(Error::Plan("single_shot solves LPP problems".into()));
    };
    let seed = plan.replica_seed(0);
    let cloud = plan.sampling.sample(seed)?;
    let (_, sol) = plan.solve_cloud(&cloud, seed)?;
    let solution = sol.expect("LPP problems return a chain");
    let check_spec = match (spec, point_to_point, plan.sampling.horizon()) {
        (ConstraintSpec::Entropy { a, b, budget }, true, Some(t)) => ConstraintSpec::Entropy { a, b, budget: budget * t },
        _ => spec,
    };
    let compatible = is_compatible(&cloud, &solution.chain, &check_spec)?.compatible;
    Ok(SingleShot { cloud, solution, compatible })
}
