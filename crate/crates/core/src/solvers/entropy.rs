use super::{LppSolution, Method, Work};
use crate::constraints::{entropy_cost, entropy_path, Chain, ConstraintSpec, BUDGET_SLACK};
use crate::error::Result;
use crate::model::{DirectedPoint, PointCloud};

/// Segment cost `|dx|^a / dt^b`, monomorphised for the common exponents.
pub(crate) trait Kernel {
    fn cost(&self, dt: f64, dx: f64) -> f64;

    /// True only when the cost certainly exceeds `room`. A cheap filter
    /// ahead of the exact comparison.
    fn exceeds(&self, dt: f64, dx: f64, room: f64) -> bool {
        self.cost(dt, dx) > room
    }
}

pub(crate) struct Quadratic;
pub(crate) struct Linear;
pub(crate) struct QuadraticVariation;
pub(crate) struct General {
    pub a: f64,
    pub b: f64,
}

// Each kernel must reproduce `entropy_cost` exactly.
impl Kernel for Quadratic {
    #[inline]
    fn cost(&self, dt: f64, dx: f64) -> f64 {
        if dx == 0.0 {
            0.0
        } else {
            dx * dx / dt
        }
    }

    #[inline]
    fn exceeds(&self, dt: f64, dx: f64, room: f64) -> bool {
        dx * dx > room * dt * (1.0 + 1e-10)
    }
}

impl Kernel for Linear {
    #[inline]
    fn cost(&self, _dt: f64, dx: f64) -> f64 {
        dx.abs()
    }
}

impl Kernel for QuadraticVariation {
    #[inline]
    fn cost(&self, _dt: f64, dx: f64) -> f64 {
        dx * dx
    }
}

impl Kernel for General {
    #[inline]
    fn cost(&self, dt: f64, dx: f64) -> f64 {
        entropy_cost(dt, dx, self.a, self.b)
    }
}

#[derive(Clone, Copy)]
struct State {
    idx: u32,
    f: f64,
    pred: u32,
}

/// Longest chain with `(a, b)`-entropy at most `budget`.
///
/// `f(i, k)` is the least entropy of a `k`-point chain ending at point `i`;
/// layers are built for increasing `k` and only states that can still finish
/// within budget are kept. With an endpoint and `a <= b + 1` the direct
/// segment to `(t, 0)` lower-bounds any completion (the segment cost is
/// subadditive then), which prunes most of the cloud.
///
/// `achieved` is the least entropy among chains of maximal length.
pub fn solve_entropy_exact(
    cloud: &PointCloud,
    a: f64,
    b: f64,
    budget: f64,
    endpoint: Option<f64>,
) -> Result<LppSolution> {
    ConstraintSpec::Entropy { a, b, budget }.validate()?;
    let pts = cloud.require_directed()?;
    let cand: Vec<usize> = (0..pts.len())
        .filter(|&i| endpoint.is_none_or(|t| pts[i].t < t))
        .collect();
    let sub: Vec<DirectedPoint> = cand.iter().map(|&i| pts[i]).collect();
    let subadditive = a <= b + 1.0;
    let (local, work) = if a == 2.0 && b == 1.0 {
        layered(&sub, &Quadratic, budget, endpoint, subadditive)
    } else if a == 1.0 && b == 0.0 {
        layered(&sub, &Linear, budget, endpoint, subadditive)
    } else if a == 2.0 && b == 0.0 {
        layered(&sub, &QuadraticVariation, budget, endpoint, subadditive)
    } else {
        layered(&sub, &General { a, b }, budget, endpoint, subadditive)
    };
    let chain = Chain {
        indices: local.iter().map(|&k| cand[k]).collect(),
        from_origin: true,
        terminal: endpoint.map(|t| DirectedPoint::new(t, 0.0)),
    };
    let achieved = entropy_path(&chain.directed_path(cloud)?, a, b)?;
    Ok(LppSolution {
        cardinality: chain.len(),
        chain,
        achieved,
        method: Method::Exact,
        work,
    })
}

fn layered<K: Kernel>(
    sub: &[DirectedPoint],
    kernel: &K,
    budget: f64,
    endpoint: Option<f64>,
    subadditive: bool,
) -> (Vec<usize>, Work) {
    let n = sub.len();
    let limit = budget + BUDGET_SLACK;
    let closing = |i: usize| match endpoint {
        Some(t) => kernel.cost(t - sub[i].t, -sub[i].x),
        None => 0.0,
    };
    // Pruning caps are relaxed slightly; the final test is exact.
    let cap: Vec<f64> = (0..n)
        .map(|i| {
            let lb = if subadditive { closing(i) } else { 0.0 };
            limit + 2.0 * BUDGET_SLACK - lb * (1.0 - 1e-9)
        })
        .collect();

    let mut work = Work::default();
    let mut layers: Vec<Vec<State>> = Vec::new();
    let mut layer: Vec<State> = (0..n)
        .filter_map(|i| {
            let f = kernel.cost(sub[i].t, sub[i].x);
            (f <= cap[i]).then_some(State { idx: i as u32, f, pred: u32::MAX })
        })
        .collect();
    work.evaluations += n as u64;

    let mut answer: Option<(usize, usize)> = None;
    let mut prefix_min: Vec<f64> = Vec::new();
    while !layer.is_empty() {
        work.states += layer.len() as u64;
        let mut best_total = f64::INFINITY;
        let mut best_at = None;
        for (p, s) in layer.iter().enumerate() {
            let total = s.f + closing(s.idx as usize);
            if total <= limit && total < best_total {
                best_total = total;
                best_at = Some(p);
            }
        }
        if let Some(p) = best_at {
            answer = Some((layers.len(), p));
        }

        prefix_min.clear();
        let mut m = f64::INFINITY;
        for s in &layer {
            m = m.min(s.f);
            prefix_min.push(m);
        }
        let mut next = Vec::new();
        let mut ptr = 0;
        for i in 0..n {
            let p_i = sub[i];
            while ptr < layer.len() && sub[layer[ptr].idx as usize].t < p_i.t {
                ptr += 1;
            }
            let mut best = cap[i];
            let mut from = u32::MAX;
            for q in (0..ptr).rev() {
                let pm = prefix_min[q];
                if pm > best || (from != u32::MAX && pm >= best) {
                    break;
                }
                let s = layer[q];
                let room = best - s.f;
                if room < 0.0 {
                    continue;
                }
                let pj = sub[s.idx as usize];
                let (dt, dx) = (p_i.t - pj.t, p_i.x - pj.x);
                work.evaluations += 1;
                if kernel.exceeds(dt, dx, room) {
                    continue;
                }
                let v = s.f + kernel.cost(dt, dx);
                if v < best || (from == u32::MAX && v <= best) {
                    best = v;
                    from = q as u32;
                }
            }
            if from != u32::MAX {
                next.push(State { idx: i as u32, f: best, pred: from });
            }
        }
        layers.push(std::mem::replace(&mut layer, next));
    }

    let mut chain = Vec::new();
    if let Some((mut k, mut p)) = answer {
        loop {
            let s = layers[k][p];
            chain.push(s.idx as usize);
            if k == 0 {
                break;
            }
            k -= 1;
            p = s.pred as usize;
        }
        chain.reverse();
    }
    (chain, work)
}
