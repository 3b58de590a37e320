use super::anneal::{anneal, seg, AnnealConfig, PathProblem};
use super::{LppSolution, Method, Work};
use crate::constraints::{is_compatible, Chain, ConstraintSpec, BUDGET_SLACK};
use crate::error::{Error, Result};
use crate::model::{PlanarPoint, PointCloud};

/// Largest cloud the exact non-directed solver accepts.
pub const HELD_KARP_CAP: usize = 20;

/// A non-directed spec as a bound on the additive segment sum
/// `S = sum ||x_i - x_{i-1}||^power`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SegmentBudget {
    pub power: f64,
    /// Outer exponent `q` and time factor `t^{-r}`: the functional is `t^{-r} S^q`.
    outer: f64,
    t: f64,
    r: f64,
    budget: f64,
}

impl SegmentBudget {
    pub(crate) fn from_spec(spec: &ConstraintSpec) -> Result<Self> {
        spec.validate()?;
        match *spec {
            ConstraintSpec::NonDirEntropy { a, b, budget, t } => Ok(SegmentBudget {
                power: a / (b + 1.0),
                outer: b + 1.0,
                t,
                r: b,
                budget,
            }),
            ConstraintSpec::NonDirHolder { gamma, a_max, t } => Ok(SegmentBudget {
                power: 1.0 / gamma,
                outer: gamma,
                t,
                r: gamma,
                budget: a_max,
            }),
            _ => Err(Error::Usage("a non-directed spec is required".into())),
        }
    }

    /// Same arithmetic as `nondir_entropy` and `nondir_holder`.
    pub(crate) fn value(&self, s: f64) -> f64 {
        self.t.powf(-self.r) * s.powf(self.outer)
    }

    pub(crate) fn feasible(&self, s: f64) -> bool {
        self.value(s) <= self.budget + BUDGET_SLACK
    }

    /// Largest admissible segment sum, slightly relaxed for pruning.
    pub(crate) fn s_max(&self) -> f64 {
        ((self.budget + BUDGET_SLACK) * self.t.powf(self.r)).powf(1.0 / self.outer) * (1.0 + 1e-9)
    }
}

/// Held–Karp table: `g[mask * n + j]` is the least segment sum of a path from
/// the origin visiting exactly `mask` and ending at `j`. Sums above `cap` are
/// dropped.
pub(crate) struct HeldKarp {
    n: usize,
    d: Vec<f64>,
    g: Vec<f64>,
}

impl HeldKarp {
    pub(crate) fn build(pos: &[PlanarPoint], power: f64, cap: f64) -> Self {
        let n = pos.len();
        let full = 1usize << n;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = seg(&pos[i], &pos[j], power);
            }
        }
        let mut g = vec![f64::INFINITY; full * n];
        for j in 0..n {
            let c = seg(&PlanarPoint::ORIGIN, &pos[j], power);
            if c <= cap {
                g[(1 << j) * n + j] = c;
            }
        }
        for mask in 1..full {
            for i in 0..n {
                let gi = g[mask * n + i];
                if mask & (1 << i) == 0 || !gi.is_finite() {
                    continue;
                }
                for j in 0..n {
                    if mask & (1 << j) != 0 {
                        continue;
                    }
                    let v = gi + d[i * n + j];
                    let k = (mask | (1 << j)) * n + j;
                    if v <= cap && v < g[k] {
                        g[k] = v;
                    }
                }
            }
        }
        HeldKarp { n, d, g }
    }

    /// `(sum, end)` minimising over end points of `mask`.
    pub(crate) fn best_end(&self, mask: usize) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for j in 0..self.n {
            if mask & (1 << j) != 0 && self.g[mask * self.n + j] < best.0 {
                best = (self.g[mask * self.n + j], j);
            }
        }
        best
    }

    pub(crate) fn path(&self, mut mask: usize, mut j: usize) -> Vec<usize> {
        let n = self.n;
        let mut out = vec![j];
        while mask != 1 << j {
            let prev = mask ^ (1 << j);
            let target = self.g[mask * n + j];
            let i = (0..n)
                .find(|&i| prev & (1 << i) != 0 && self.g[prev * n + i] + self.d[i * n + j] == target)
                .expect("Held–Karp predecessor");
            out.push(i);
            mask = prev;
            j = i;
        }
        out.reverse();
        out
    }

    pub(crate) fn states(&self) -> u64 {
        self.g.len() as u64
    }
}

/// Exact non-directed LPP for clouds of at most [`HELD_KARP_CAP`] points.
///
/// `achieved` is the least functional value among maximal sets.
pub fn solve_nondir_heldkarp(cloud: &PointCloud, spec: &ConstraintSpec) -> Result<LppSolution> {
    let sb = SegmentBudget::from_spec(spec)?;
    let pos = cloud.require_planar()?;
    let n = pos.len();
    if n > HELD_KARP_CAP {
        return Err(Error::SizeCap {
            what: "Held–Karp cloud",
            size: n,
            cap: HELD_KARP_CAP,
        });
    }
    let hk = HeldKarp::build(pos, sb.power, sb.s_max());
    let mut best: Option<(u32, f64, usize, usize)> = None;
    for mask in 1..(1usize << n) {
        let (s, j) = hk.best_end(mask);
        if !sb.feasible(s) {
            continue;
        }
        let size = mask.count_ones();
        let better = match best {
            None => true,
            Some((bs, bsum, _, _)) => size > bs || (size == bs && s < bsum),
        };
        if better {
            best = Some((size, s, mask, j));
        }
    }
    let indices = best.map_or_else(Vec::new, |(_, _, mask, j)| hk.path(mask, j));
    let chain = Chain::new(indices);
    let achieved = is_compatible(cloud, &chain, spec)?.value;
    Ok(LppSolution {
        cardinality: chain.len(),
        chain,
        achieved,
        method: Method::HeldKarp,
        work: Work {
            evaluations: (n * n) as u64,
            states: hk.states(),
        },
    })
}

/// Annealed lower bound on the non-directed LPP, any cloud size.
///
/// The energy `-|P| + S / (2 S_max)` ranks paths by cardinality first and
/// segment sum second; paths over budget are rejected outright.
pub fn solve_nondir_anneal(cloud: &PointCloud, spec: &ConstraintSpec, config: &AnnealConfig) -> Result<LppSolution> {
    config.validate()?;
    let sb = SegmentBudget::from_spec(spec)?;
    let pos = cloud.require_planar()?;
    let s_max = sb.s_max();
    let scale = if s_max > 0.0 { s_max } else { 1.0 };
    let weight = vec![1.0; pos.len()];
    let prob = PathProblem {
        pos,
        weight: &weight,
        power: sb.power,
        energy: |n: usize, _w: f64, s: f64| (s <= s_max).then(|| -(n as f64) + 0.5 * s / scale),
    };
    let out = anneal(&prob, config);
    let mut chain = Chain::new(out.path);
    let mut check = is_compatible(cloud, &chain, spec)?;
    while !check.compatible {
        chain.indices.pop();
        check = is_compatible(cloud, &chain, spec)?;
    }
    Ok(LppSolution {
        cardinality: chain.len(),
        chain,
        achieved: check.value,
        method: Method::Anneal {
            cooling: config.cooling,
            sweeps: config.sweeps,
            restarts: config.restarts,
        },
        work: Work {
            evaluations: out.moves,
            states: out.moves,
        },
    })
}
