//! Command-line front end.
//!
//! Every subcommand reads one flat [`RunConfig`], optionally loaded from a
//! TOML file with flags taking precedence. Outputs are rendered in memory and
//! then written to the output directory together with `manifest.json`, which
//! `clpp rerun` replays byte for byte. Wall-clock timing goes only to the
//! sidecar `run.log`.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analytics::{
    induction_entropy, induction_holder, induction_nondir, mc_volume, Region, MC_MIN_SAMPLES,
};
use crate::constraints::{is_compatible, ConstraintSpec};
use crate::error::{Error, Result};
use crate::experiments::{
    check_scaling_distribution, estimate_constant, exponent_fit, fluctuation_study, svg_exponent_plot,
    svg_histogram, svg_path_plot, verify_tail_bounds, Problem, ReplicaPlan, Sampling, ScalingPair,
    SolverChoice, TwTable, CODE_VERSION, DEFAULT_TW_TABLE,
};
use crate::model::{default_window, read_cloud, PointCloud, Points};
use crate::rng::derive_seed;
use crate::solvers::{
    solve_entropy_exact, solve_holder_exact, solve_nondir_anneal, solve_nondir_heldkarp, AnnealConfig,
    HELD_KARP_CAP,
};

/// Manifest layout version.
pub const MANIFEST_VERSION: u32 = 1;

/// Default cap on directed cloud size for the exact DP in `solve`.
pub const DEFAULT_DP_CAP: usize = 100_000;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "clpp", version, about = "Path-constrained last-passage percolation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a point cloud and write it in the CLPP binary format.
    Sample(Args),
    /// Solve one cloud exactly (or by annealing for non-directed constraints).
    Solve(Args),
    /// Estimate a limiting constant from point-to-point replicas.
    Estimate(Args),
    /// Fit the growth exponent of E[L_m].
    Exponent(Args),
    /// Check tail probabilities against the rigorous bounds.
    Bounds(Args),
    /// KS test of a distributional scaling identity.
    Scaling(Args),
    /// Fluctuation study against the Tracy-Widom table.
    Fluct(Args),
    /// Closed-form volumes of compatible regions.
    Volume(Args),
    /// Re-run a previous invocation from its manifest.
    Rerun {
        manifest: PathBuf,
        /// Output directory; defaults to the manifest's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// TOML file of flat `key = value` settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Uniform,
    Poisson,
    Disk,
    HeavyTail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    Holder,
    Entropy,
    NondirEntropy,
    NondirHolder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Exact,
    HeldKarp,
    Anneal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairKind {
    Holder,
    Entropy,
    Polymer,
    HeavyTail,
}

/// Every setting of every subcommand; unset fields take per-command defaults.
#[derive(clap::Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Base seed; falls back to CLPP_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,

    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub t: Option<f64>,
    /// Box half-width.
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Strip half-width; defaults to `window_c * t^{2/3}`.
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long)]
    pub window_c: Option<f64>,
    /// Disk radius.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Heavy-tail field radius.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub wmin: Option<f64>,

    #[arg(long, value_enum)]
    pub constraint: Option<ConstraintKind>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a_max: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long = "B", alias = "budget")]
    #[serde(rename = "B")]
    pub budget: Option<f64>,
    /// Horizon of non-directed constraints.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Planar half-side for non-directed volumes.
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub point_to_point: Option<bool>,

    #[arg(long, value_enum)]
    pub solver: Option<SolverKind>,
    /// Shorthand for `--solver exact` (or Held-Karp for non-directed constraints).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub exact: Option<bool>,
    /// Shorthand for `--solver anneal`.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub anneal: Option<bool>,
    #[arg(long)]
    pub cooling: Option<f64>,
    #[arg(long)]
    pub sweeps: Option<f64>,
    #[arg(long)]
    pub restarts: Option<u32>,
    /// Largest directed cloud `solve` hands to the exact DP.
    #[arg(long)]
    pub dp_cap: Option<usize>,

    #[arg(long)]
    pub replicas: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    pub ms: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub ks: Option<Vec<usize>>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub samples: Option<u64>,
    /// Allowed exponent deviation.
    #[arg(long)]
    pub tolerance: Option<f64>,

    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long, value_enum)]
    pub pair: Option<PairKind>,

    /// Input cloud for `solve`.
    #[arg(long)]
    pub cloud: Option<PathBuf>,
    /// Tracy-Widom CDF table for `fluct`.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Also write JSON copies of binary outputs.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub json: Option<bool>,
    /// Write SVG figures where available.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub svg: Option<bool>,
    /// Also evaluate the induction recursion in `volume`.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub induction: Option<bool>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Usage(format!("bad config file: {e}")))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Usage(format!("cannot encode config: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<RunConfig> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::from_toml(&text)
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overridden_by(&self, flags: &RunConfig) -> Result<RunConfig> {
        let mut base = serde_json::to_value(self)?;
        let over = serde_json::to_value(flags)?;
        if let (Some(b), Some(o)) = (base.as_object_mut(), over.as_object()) {
            for (k, v) in o {
                if !v.is_null() {
                    b.insert(k.clone(), v.clone());
                }
            }
        }
        Ok(serde_json::from_value(base)?)
    }

    /// Seed from the config, else `CLPP_SEED`, else 0.
    pub fn resolve_seed(&mut self) -> Result<u64> {
        let seed = match self.seed {
            Some(s) => s,
            None => match std::env::var("CLPP_SEED") {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Usage(format!("CLPP_SEED must be an unsigned integer, got {v:?}")))?,
                Err(_) => 0,
            },
        };
        self.seed = Some(seed);
        Ok(seed)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn spec(&self, default: Option<ConstraintKind>) -> Result<ConstraintSpec> {
        let kind = self
            .constraint
            .or(default)
            .ok_or_else(|| Error::Usage("--constraint is required".into()))?;
        let spec = match kind {
            ConstraintKind::Holder => ConstraintSpec::Holder {
                gamma: self.gamma.unwrap_or(1.0),
                a_max: self.a_max.unwrap_or(1.0),
            },
            ConstraintKind::Entropy => ConstraintSpec::Entropy {
                a: self.a.unwrap_or(2.0),
                b: self.b.unwrap_or(1.0),
                budget: self.budget.unwrap_or(1.0),
            },
            ConstraintKind::NondirEntropy => ConstraintSpec::NonDirEntropy {
                a: self.a.unwrap_or(2.0),
                b: self.b.unwrap_or(1.0),
                budget: self.budget.unwrap_or(1.0),
                t: self.horizon.unwrap_or(1.0),
            },
            ConstraintKind::NondirHolder => ConstraintSpec::NonDirHolder {
                gamma: self.gamma.unwrap_or(1.0),
                a_max: self.a_max.unwrap_or(1.0),
                t: self.horizon.unwrap_or(1.0),
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    fn anneal_config(&self, light: bool) -> AnnealConfig {
        let base = if light {
            AnnealConfig { restarts: 1, ..AnnealConfig::default() }
        } else {
            AnnealConfig::default()
        };
        AnnealConfig {
            cooling: self.cooling.unwrap_or(base.cooling),
            sweeps: self.sweeps.unwrap_or(base.sweeps),
            restarts: self.restarts.unwrap_or(base.restarts),
            seed: derive_seed(self.seed(), 0xa11),
            ..base
        }
    }

    fn solver_kind(&self) -> Result<Option<SolverKind>> {
        let mut picked = self.solver;
        for (flag, kind) in [(self.exact, SolverKind::Exact), (self.anneal, SolverKind::Anneal)] {
            if flag == Some(true) {
                if picked.is_some_and(|p| p != kind && !(p == SolverKind::HeldKarp && kind == SolverKind::Exact)) {
                    return Err(Error::Usage("conflicting solver flags".into()));
                }
                picked = picked.or(Some(kind));
            }
        }
        Ok(picked)
    }

    /// Solver for `spec`: directed specs are exact, non-directed ones default
    /// to annealing (light schedule when `light`).
    fn solver(&self, spec: &ConstraintSpec, light: bool) -> Result<SolverChoice> {
        let kind = self.solver_kind()?;
        if spec.is_directed() {
            return match kind {
                None | Some(SolverKind::Exact) => Ok(SolverChoice::Exact),
                Some(_) => Err(Error::Usage(
                    "directed constraints are solved exactly; annealing and Held-Karp are for non-directed constraints"
                        .into(),
                )),
            };
        }
        Ok(match kind {
            Some(SolverKind::Exact) | Some(SolverKind::HeldKarp) => SolverChoice::HeldKarp,
            None | Some(SolverKind::Anneal) => SolverChoice::Anneal(self.anneal_config(light)),
        })
    }

    fn strip(&self, t_default: f64) -> Sampling {
        let t = self.t.unwrap_or(t_default);
        Sampling::Poisson {
            lambda: self.lambda.unwrap_or(1.0),
            t,
            window: self.window.unwrap_or_else(|| default_window(t, self.window_c.unwrap_or(1.0))),
        }
    }

    fn sampling(&self) -> Result<Sampling> {
        let need_m = || self.m.ok_or_else(|| Error::Usage("--m is required for this model".into()));
        Ok(match self.model.ok_or_else(|| Error::Usage("--model is required".into()))? {
            ModelKind::Uniform => Sampling::Uniform { m: need_m()?, t: self.t.unwrap_or(1.0), x: self.x.unwrap_or(1.0) },
            ModelKind::Poisson => {
                let t = self.t.ok_or_else(|| Error::Usage("--t is required for the poisson model".into()))?;
                self.strip(t)
            }
            ModelKind::Disk => Sampling::Disk { m: need_m()?, r: self.r.unwrap_or(1.0) },
            ModelKind::HeavyTail => Sampling::HeavyTail {
                alpha: self.alpha.unwrap_or(1.5),
                radius: self.radius.unwrap_or(3.0),
                wmin: self.wmin.unwrap_or(0.2),
            },
        })
    }
}

/// Result of a check, printed one per line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

/// Rendered outputs of one command.
#[derive(Debug, Default)]
pub struct Outcome {
    /// File name and contents, in writing order.
    pub files: Vec<(String, Vec<u8>)>,
    pub checks: Vec<Check>,
    /// Lines printed to stdout.
    pub summary: Vec<String>,
}

impl Outcome {
    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.files.push((name.into(), s.into_bytes()));
        Ok(())
    }

    fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Usage(format!("csv buffer: {e}")))?;
        self.files.push((name.into(), bytes));
        Ok(())
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub manifest_version: u32,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// Resolved configuration, output directory excluded.
    pub config: RunConfig,
    pub outputs: Vec<String>,
}

/// Runs `command` with a resolved configuration and renders its outputs.
pub fn execute(command: &str, cfg: &RunConfig) -> Result<Outcome> {
    match command {
        "sample" => cmd_sample(cfg),
        "solve" => cmd_solve(cfg),
        "estimate" => cmd_estimate(cfg),
        "exponent" => cmd_exponent(cfg),
        "bounds" => cmd_bounds(cfg),
        "scaling" => cmd_scaling(cfg),
        "fluct" => cmd_fluct(cfg),
        "volume" => cmd_volume(cfg),
        other => Err(Error::Usage(format!("unknown command {other:?}"))),
    }
}

fn cmd_sample(cfg: &RunConfig) -> Result<Outcome> {
    let sampling = cfg.sampling()?;
    let cloud = sampling.sample(cfg.seed())?;
    let mut out = Outcome::default();
    out.files.push(("cloud.clpp".into(), cloud.to_bytes()));
    if cfg.json == Some(true) {
        let mut s = cloud.to_json()?;
        s.push('\n');
        out.files.push(("cloud.json".into(), s.into_bytes()));
    }
    out.summary.push(format!("points: {}", cloud.len()));
    out.summary.push(bounding_line(&cloud));
    Ok(out)
}

fn bounding_line(cloud: &PointCloud) -> String {
    let xy: Vec<(f64, f64)> = match cloud.points() {
        Points::Directed(p) => p.iter().map(|q| (q.t, q.x)).collect(),
        Points::Planar(p) => p.iter().map(|q| (q.x, q.y)).collect(),
        Points::Weighted(p) => p.iter().map(|q| (q.x, q.y)).collect(),
    };
    if xy.is_empty() {
        return "bounding box: empty".into();
    }
    let fold = |f: fn(&(f64, f64)) -> f64| {
        xy.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (u, v) = (fold(|p| p.0), fold(|p| p.1));
    format!("bounding box: [{:.6}, {:.6}] x [{:.6}, {:.6}]", u.0, u.1, v.0, v.1)
}

#[derive(Serialize)]
struct SolveReport<'a> {
    version: &'a str,
    cloud: Option<&'a Path>,
    points: usize,
    cloud_seed: u64,
    spec: ConstraintSpec,
    point_to_point: bool,
    solver: SolverChoice,
    cardinality: usize,
    solution: &'a crate::solvers::LppSolution,
    compatible: bool,
}

fn cmd_solve(cfg: &RunConfig) -> Result<Outcome> {
    let cloud = match &cfg.cloud {
        Some(p) => read_cloud(p)?,
        None => cfg.sampling()?.sample(cfg.seed())?,
    };
    let spec = cfg.spec(None)?;
    let p2p = cfg.point_to_point.unwrap_or(false);
    let solver = cfg.solver(&spec, false)?;
    let n = cloud.len();
    let (solution, check_spec) = match spec {
        ConstraintSpec::Holder { .. } | ConstraintSpec::Entropy { .. } => {
            let cap = cfg.dp_cap.unwrap_or(DEFAULT_DP_CAP);
            if n > cap {
                return Err(Error::Usage(format!(
                    "cloud has {n} points, above the exact DP cap of {cap}; raise --dp-cap or shrink the window \
                     (--anneal is available for non-directed constraints only)"
                )));
            }
            let end = cloud.domain().horizon();
            let endpoint = if p2p {
                Some(end.ok_or_else(|| Error::Usage("--point-to-point needs a directed cloud".into()))?)
            } else {
                None
            };
            match spec {
                ConstraintSpec::Holder { gamma, a_max } => (solve_holder_exact(&cloud, gamma, a_max, endpoint)?, spec),
                ConstraintSpec::Entropy { a, b, budget } => {
                    let budget = endpoint.map_or(budget, |t| budget * t);
                    (
                        solve_entropy_exact(&cloud, a, b, budget, endpoint)?,
                        ConstraintSpec::Entropy { a, b, budget },
                    )
                }
                _ => unreachable!(),
            }
        }
        _ => {
            if p2p {
                return Err(Error::Usage("non-directed paths have no terminal point".into()));
            }
            let sol = match solver {
                SolverChoice::HeldKarp if n > HELD_KARP_CAP => {
                    return Err(Error::Usage(format!(
                        "cloud has {n} points, Held-Karp is limited to {HELD_KARP_CAP}; use --anneal"
                    )))
                }
                SolverChoice::HeldKarp => solve_nondir_heldkarp(&cloud, &spec)?,
                SolverChoice::Anneal(c) => solve_nondir_anneal(&cloud, &spec, &c)?,
                SolverChoice::Exact => unreachable!(),
            };
            (sol, spec)
        }
    };
    let compatible = is_compatible(&cloud, &solution.chain, &check_spec)?.compatible;
    let report = SolveReport {
        version: CODE_VERSION,
        cloud: cfg.cloud.as_deref(),
        points: n,
        cloud_seed: cloud.seed(),
        spec,
        point_to_point: p2p,
        solver,
        cardinality: solution.cardinality,
        solution: &solution,
        compatible,
    };
    let mut out = Outcome::default();
    out.json("solution.json", &report)?;
    if cfg.svg == Some(true) {
        out.files.push(("path.svg".into(), svg_path_plot(&cloud, &solution.chain)?.into_bytes()));
    }
    let bound = if solution.method.is_exact() { "" } else { " (lower bound)" };
    out.summary.push(format!("cardinality: {}{bound}", solution.cardinality));
    out.summary.push(format!("achieved: {}", solution.achieved));
    out.checks.push(Check::new("compatible", compatible, "optimiser re-validated against the constraint"));
    Ok(out)
}

fn cmd_estimate(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.spec(Some(ConstraintKind::Holder))?;
    if !spec.is_directed() {
        return Err(Error::Usage("estimate runs directed point-to-point constraints".into()));
    }
    let plan = ReplicaPlan {
        problem: Problem::Lpp { spec, point_to_point: cfg.point_to_point.unwrap_or(true) },
        sampling: cfg.strip(100.0),
        solver: SolverChoice::Exact,
        replicas: cfg.replicas.unwrap_or(50),
        seed: cfg.seed(),
        jobs: None,
    };
    let report = estimate_constant(&plan)?;
    let mut out = Outcome::default();
    out.json("report.json", &report)?;
    out.csv("values.csv", &report.values)?;
    let se = report.stderr.map_or("n/a".to_string(), |s| format!("{s:.6}"));
    out.summary.push(format!("estimate: {:.6} +/- {se} ({} replicas)", report.estimate, report.replicas));
    if let Some(c) = &report.conjecture {
        out.summary.push(format!("conjectured curve: {:.6} (conjecture, not a proven value)", c.value));
        if let Some(note) = &c.note {
            out.summary.push(format!("note: {note}"));
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct MeanRow {
    m: usize,
    mean: f64,
    stderr: Option<f64>,
}

fn cmd_exponent(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.spec(Some(ConstraintKind::Holder))?;
    let solver = cfg.solver(&spec, true)?;
    let ms = cfg.ms.clone().unwrap_or_else(|| (7..=13).map(|e| 1usize << e).collect());
    let report = exponent_fit(&spec, &ms, cfg.replicas.unwrap_or(4), cfg.seed(), &solver)?;
    let tol = cfg.tolerance.unwrap_or(0.05);
    let mut out = Outcome::default();
    out.json("report.json", &report)?;
    let rows: Vec<MeanRow> = (0..ms.len())
        .map(|i| MeanRow { m: ms[i], mean: report.means[i], stderr: report.stderrs[i] })
        .collect();
    out.csv("means.csv", &rows)?;
    out.files.push(("exponent.svg".into(), svg_exponent_plot(&report).into_bytes()));
    out.summary.push(format!("slope: {:.4}, predicted {:.4}", report.fit.slope, report.predicted));
    if let Some(x) = &report.cross_check {
        out.summary.push(format!(
            "anneal vs Held-Karp at m = {}: {}/{} agree, max gap {}",
            x.m, x.agree, x.instances, x.max_gap
        ));
    }
    out.checks.push(Check::new(
        "exponent",
        report.deviation().abs() <= tol,
        format!("|{:.4} - {:.4}| <= {tol}", report.fit.slope, report.predicted),
    ));
    Ok(out)
}

fn cmd_bounds(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.spec(Some(ConstraintKind::Entropy))?;
    let m = cfg.m.unwrap_or(200);
    let ks = cfg.ks.clone().unwrap_or_else(|| (0..=m.min(40)).collect());
    let (t, x) = (cfg.t.unwrap_or(1.0), cfg.x.unwrap_or(1.0));
    let report = verify_tail_bounds(&spec, m, t, x, &ks, cfg.replicas.unwrap_or(1000), cfg.seed())?;
    let mut out = Outcome::default();
    out.json("report.json", &report)?;
    out.csv("bounds.csv", &report.checks)?;
    for c in &report.checks {
        let le = c.bound_le.map_or("none".to_string(), |b| format!("{b:.4e}"));
        out.checks.push(Check::new(
            format!("k={}", c.k),
            c.ok_ge && c.ok_le,
            format!(
                "P(L>=k)={:.4} vs {:.4e}, P(L<=k)={:.4} vs {le}",
                c.p_ge, c.bound_ge, c.p_le
            ),
        ));
    }
    Ok(out)
}

fn cmd_scaling(cfg: &RunConfig) -> Result<Outcome> {
    let pair = match cfg.pair.ok_or_else(|| Error::Usage("--pair is required".into()))? {
        PairKind::Holder => ScalingPair::HolderIntensity {
            gamma: cfg.gamma.unwrap_or(1.0),
            a_max: cfg.a_max.unwrap_or(1.0),
            lambda: cfg.lambda.unwrap_or(4.0),
            t: cfg.t.unwrap_or(50.0),
            window: cfg.window.unwrap_or(25.0),
        },
        PairKind::Entropy => ScalingPair::EntropyIntensity {
            a: cfg.a.unwrap_or(2.0),
            b: cfg.b.unwrap_or(1.0),
            budget: cfg.budget.unwrap_or(1.0),
            lambda: cfg.lambda.unwrap_or(4.0),
            t: cfg.t.unwrap_or(20.0),
            window: cfg.window.unwrap_or(8.0),
        },
        PairKind::Polymer => ScalingPair::Polymer {
            a: cfg.a.unwrap_or(2.0),
            b: cfg.b.unwrap_or(1.0),
            beta: cfg.beta.unwrap_or(2.0),
            t: cfg.t.unwrap_or(20.0),
            window: cfg.window.unwrap_or(4.0),
        },
        PairKind::HeavyTail => ScalingPair::HeavyTail {
            alpha: cfg.alpha.unwrap_or(1.5),
            nu: cfg.nu.unwrap_or(2.0),
            beta: cfg.beta.unwrap_or(2.0),
            radius: cfg.radius.unwrap_or(3.0 * 2f64.powf(1.5)),
            wmin: cfg.wmin.unwrap_or(0.8),
            anneal: AnnealConfig {
                cooling: cfg.cooling.unwrap_or(0.9),
                sweeps: cfg.sweeps.unwrap_or(100.0),
                restarts: cfg.restarts.unwrap_or(1),
                ..AnnealConfig::with_seed(derive_seed(cfg.seed(), 0xa11))
            },
        },
    };
    let report = check_scaling_distribution(&pair, cfg.samples.unwrap_or(2000) as u32, cfg.seed())?;
    let mut out = Outcome::default();
    out.json("report.json", &report)?;
    #[derive(Serialize)]
    struct Row {
        side: &'static str,
        value: f64,
    }
    let rows: Vec<Row> = report
        .left
        .iter()
        .map(|&value| Row { side: "left", value })
        .chain(report.right.iter().map(|&value| Row { side: "right", value }))
        .collect();
    out.csv("values.csv", &rows)?;
    out.checks.push(Check::new(
        "ks",
        report.passed,
        format!("D = {:.4}, p = {:.4}", report.ks.statistic, report.ks.p_value),
    ));
    Ok(out)
}

fn cmd_fluct(cfg: &RunConfig) -> Result<Outcome> {
    let spec = match cfg.constraint {
        None => ConstraintSpec::Holder { gamma: cfg.gamma.unwrap_or(0.0), a_max: cfg.a_max.unwrap_or(1.0) },
        Some(_) => cfg.spec(None)?,
    };
    if !spec.is_directed() {
        return Err(Error::Usage("fluct runs directed point-to-point constraints".into()));
    }
    let table_path = cfg.table.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_TW_TABLE));
    let table = TwTable::load(&table_path)?;
    let plan = ReplicaPlan {
        problem: Problem::Lpp { spec, point_to_point: true },
        sampling: cfg.strip(500.0),
        solver: SolverChoice::Exact,
        replicas: cfg.replicas.unwrap_or(1000),
        seed: cfg.seed(),
        jobs: None,
    };
    let report = fluctuation_study(&plan, &table, &table_path)?;
    let mut out = Outcome::default();
    out.json("report.json", &report)?;
    out.csv("values.csv", &report.values)?;
    out.files.push((
        "histogram.svg".into(),
        svg_histogram(&report.histogram, report.values.len(), Some(&table)).into_bytes(),
    ));
    out.summary.push(format!("mean L/t: {:.4}", report.mean_over_t));
    out.summary.push(format!("C fit: {:.4}, c fit: {:.4}", report.big_c_hat, report.c_hat));
    out.summary.push(format!("KS distance to TW: {:.4}", report.ks_distance));
    out.checks.push(Check::new(
        "skewness",
        report.moments.skewness > 0.0,
        format!("standardised skewness {:.4} (TW {:.4})", report.moments.skewness, report.tw_skewness),
    ));
    Ok(out)
}

#[derive(Serialize)]
struct VolumeReport {
    version: &'static str,
    region: Region,
    exact: f64,
    mc: Option<crate::analytics::McEstimate>,
    mc_seed: Option<u64>,
    induction: Option<f64>,
}

fn cmd_volume(cfg: &RunConfig) -> Result<Outcome> {
    let k = cfg.k.unwrap_or(1);
    let region = match cfg.constraint.unwrap_or(ConstraintKind::Entropy) {
        ConstraintKind::Entropy => Region::Entropy {
            k,
            t: cfg.t.unwrap_or(1.0),
            budget: cfg.budget.unwrap_or(1.0),
            a: cfg.a.unwrap_or(2.0),
            b: cfg.b.unwrap_or(1.0),
        },
        ConstraintKind::Holder => Region::Holder {
            k,
            t: cfg.t.unwrap_or(1.0),
            a_max: cfg.a_max.unwrap_or(1.0),
            gamma: cfg.gamma.unwrap_or(1.0),
        },
        ConstraintKind::NondirEntropy => Region::NonDir {
            k,
            d: cfg.d.unwrap_or(1.0),
            a: cfg.a.unwrap_or(2.0),
            b: cfg.b.unwrap_or(1.0),
        },
        ConstraintKind::NondirHolder => {
            return Err(Error::Usage("volume supports holder, entropy and nondir-entropy".into()))
        }
    };
    let exact = region.exact()?;
    let mut out = Outcome::default();
    out.summary.push(format!("{exact}"));
    let mc = match cfg.samples {
        Some(n) => {
            let est = mc_volume(&region, n.max(MC_MIN_SAMPLES), cfg.seed())?;
            let ok = (est.estimate - exact).abs() <= 3.0 * est.stderr;
            out.checks.push(Check::new(
                "monte-carlo",
                ok,
                format!("{:.6e} +/- {:.2e} vs {exact:.6e}", est.estimate, est.stderr),
            ));
            Some(est)
        }
        None => None,
    };
    let induction = if cfg.induction == Some(true) {
        let v = match region {
            Region::Entropy { k, t, budget, a, b } => induction_entropy(k, t, budget, a, b)?,
            Region::Holder { k, t, a_max, gamma } => induction_holder(k, t, a_max, gamma)?,
            Region::NonDir { k, d, a, b } => induction_nondir(k, d, a, b)?,
        };
        let rel = if exact == 0.0 { v.abs() } else { ((v - exact) / exact).abs() };
        out.checks.push(Check::new("induction", rel <= 1e-6, format!("{v:.12e}, relative gap {rel:.2e}")));
        Some(v)
    } else {
        None
    };
    let report = VolumeReport {
        version: CODE_VERSION,
        region,
        exact,
        mc_seed: mc.map(|_| cfg.seed()),
        mc,
        induction,
    };
    out.json("report.json", &report)?;
    Ok(out)
}

/// Runs `command` and writes its outputs plus the manifest into `out_dir`.
pub fn run_to_dir(command: &str, cfg: &RunConfig, out_dir: &Path) -> Result<Outcome> {
    let mut cfg = cfg.clone();
    let seed = cfg.resolve_seed()?;
    cfg.out = None;
    let started = Instant::now();
    let outcome = match cfg.jobs {
        Some(0) => return Err(Error::Usage("--jobs must be positive".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::Usage(format!("cannot build a thread pool: {e}")))?
            .install(|| execute(command, &cfg))?,
        None => execute(command, &cfg)?,
    };
    let elapsed = started.elapsed();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    for (name, bytes) in &outcome.files {
        let p = out_dir.join(name);
        std::fs::write(&p, bytes).map_err(|e| Error::io(&p, e))?;
    }
    let manifest = Manifest {
        manifest_version: MANIFEST_VERSION,
        version: CODE_VERSION.into(),
        command: command.into(),
        seed,
        config: cfg,
        outputs: outcome.files.iter().map(|f| f.0.clone()).collect(),
    };
    crate::experiments::write_json(&manifest, out_dir.join("manifest.json"))?;
    append_log(out_dir, command, elapsed.as_secs_f64())?;
    Ok(outcome)
}

fn append_log(dir: &Path, command: &str, secs: f64) -> Result<()> {
    use std::io::Write;
    let p = dir.join("run.log");
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&p)
        .map_err(|e| Error::io(&p, e))?;
    writeln!(f, "unix_time={stamp} command={command} elapsed_s={secs:.3}").map_err(|e| Error::io(&p, e))
}

/// Re-executes a manifest into `out_dir` (default: the manifest's directory).
pub fn rerun(manifest: &Path, out_dir: Option<&Path>) -> Result<Outcome> {
    let text = std::fs::read_to_string(manifest).map_err(|e| Error::io(manifest, e))?;
    let m: Manifest = serde_json::from_str(&text)?;
    if m.manifest_version != MANIFEST_VERSION {
        return Err(Error::Usage(format!("unsupported manifest version {}", m.manifest_version)));
    }
    let dir = out_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| manifest.parent().unwrap_or(Path::new(".")).to_path_buf());
    run_to_dir(&m.command, &m.config, &dir)
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::Format(_) | Error::Csv(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn report(outcome: &Outcome) -> i32 {
    for line in &outcome.summary {
        println!("{line}");
    }
    for c in &outcome.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if outcome.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    let (name, args) = match cli.command {
        Command::Rerun { manifest, out } => return rerun(&manifest, out.as_deref()),
        Command::Sample(a) => ("sample", a),
        Command::Solve(a) => ("solve", a),
        Command::Estimate(a) => ("estimate", a),
        Command::Exponent(a) => ("exponent", a),
        Command::Bounds(a) => ("bounds", a),
        Command::Scaling(a) => ("scaling", a),
        Command::Fluct(a) => ("fluct", a),
        Command::Volume(a) => ("volume", a),
    };
    let cfg = match &args.config {
        Some(p) => RunConfig::load(p)?.overridden_by(&args.run)?,
        None => args.run,
    };
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    run_to_dir(name, &cfg, &dir)
}

/// Parses `args` (program name first), runs, prints, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match dispatch(cli) {
        Ok(outcome) => report(&outcome),
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
