//! Exhaustive enumeration, used as a test oracle for the exact solvers.

use super::anneal::seg;
use super::heavy::evaluate;
use super::nondir::SegmentBudget;
use super::{LppSolution, Method, VariationalSolution, Work};
use crate::constraints::{check_ab, entropy_path, is_compatible, Chain, ConstraintSpec};
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::model::{DirectedPoint, PlanarPoint, PointCloud};

pub const BRUTE_DIRECTED_CAP: usize = 10;
pub const BRUTE_NONDIR_CAP: usize = 9;
pub const BRUTE_HEAVY_CAP: usize = 12;

fn cap(what: &'static str, size: usize, cap: usize) -> Result<()> {
    if size > cap {
        Err(Error::SizeCap { what, size, cap })
    } else {
        Ok(())
    }
}

fn mask_chain(mask: usize, m: usize, endpoint: Option<f64>) -> Chain {
    Chain {
        indices: (0..m).filter(|i| mask & (1 << i) != 0).collect(),
        from_origin: true,
        terminal: endpoint.map(|t| DirectedPoint::new(t, 0.0)),
    }
}

/// Largest compatible set by enumeration. Directed specs try every subset in
/// time order; non-directed specs try every ordered subset.
///
/// `achieved` is the least functional value among maximal sets.
pub fn brute_force_lpp(cloud: &PointCloud, spec: &ConstraintSpec, endpoint: Option<f64>) -> Result<LppSolution> {
    spec.validate()?;
    if spec.is_directed() {
        let m = cloud.require_directed()?.len();
        cap("directed brute force", m, BRUTE_DIRECTED_CAP)?;
        let mut best = (mask_chain(0, m, endpoint), is_compatible(cloud, &mask_chain(0, m, endpoint), spec)?.value);
        for mask in 1..(1usize << m) {
            let chain = mask_chain(mask, m, endpoint);
            let c = is_compatible(cloud, &chain, spec)?;
            if c.compatible && (chain.len() > best.0.len() || (chain.len() == best.0.len() && c.value < best.1)) {
                best = (chain, c.value);
            }
        }
        return Ok(LppSolution {
            cardinality: best.0.len(),
            chain: best.0,
            achieved: best.1,
            method: Method::BruteForce,
            work: Work { evaluations: 1 << m, states: 1 << m },
        });
    }
    let pos = cloud.require_planar()?;
    cap("non-directed brute force", pos.len(), BRUTE_NONDIR_CAP)?;
    let sb = SegmentBudget::from_spec(spec)?;
    let mut search = OrderedSearch {
        pos,
        sb,
        s_max: sb.s_max(),
        used: vec![false; pos.len()],
        path: Vec::new(),
        best: Vec::new(),
        best_sum: 0.0,
        visited: 0,
    };
    search.dfs(&PlanarPoint::ORIGIN, 0.0);
    let chain = Chain::new(search.best);
    let achieved = is_compatible(cloud, &chain, spec)?.value;
    Ok(LppSolution {
        cardinality: chain.len(),
        chain,
        achieved,
        method: Method::BruteForce,
        work: Work { evaluations: search.visited, states: search.visited },
    })
}

struct OrderedSearch<'a> {
    pos: &'a [PlanarPoint],
    sb: SegmentBudget,
    s_max: f64,
    used: Vec<bool>,
    path: Vec<usize>,
    best: Vec<usize>,
    best_sum: f64,
    visited: u64,
}

impl OrderedSearch<'_> {
    fn dfs(&mut self, last: &PlanarPoint, sum: f64) {
        self.visited += 1;
        if self.sb.feasible(sum)
            && (self.path.len() > self.best.len() || (self.path.len() == self.best.len() && sum < self.best_sum))
        {
            self.best.clone_from(&self.path);
            self.best_sum = sum;
        }
        for j in 0..self.pos.len() {
            if self.used[j] {
                continue;
            }
            let s = sum + seg(last, &self.pos[j], self.sb.power);
            if s > self.s_max {
                continue;
            }
            self.used[j] = true;
            self.path.push(j);
            let q = self.pos[j];
            self.dfs(&q, s);
            self.path.pop();
            self.used[j] = false;
        }
    }
}

/// Exact `max beta |D| - Ent(D + (t, 0))` over subsets in time order.
pub fn brute_force_polymer(cloud: &PointCloud, beta: f64, a: f64, b: f64, t: f64) -> Result<VariationalSolution> {
    require_non_negative("beta", beta)?;
    require_positive("t", t)?;
    check_ab(a, b)?;
    let pts = cloud.require_directed()?;
    let m = pts.len();
    cap("polymer brute force", m, BRUTE_DIRECTED_CAP)?;
    let mut best = (Chain::point_to_point(Vec::new(), t), 0.0, 0.0);
    for mask in 1..(1usize << m) {
        let chain = mask_chain(mask, m, Some(t));
        let path = chain.directed_path(cloud)?;
        if !path.windows(2).all(|w| w[0].t < w[1].t) {
            continue;
        }
        let ent = entropy_path(&path, a, b)?;
        let value = beta * chain.len() as f64 - ent;
        if value > best.1 {
            best = (chain, value, ent);
        }
    }
    let (chain, value, entropy) = best;
    Ok(VariationalSolution {
        value,
        energy: chain.len() as f64,
        chain,
        entropy,
        method: Method::BruteForce,
    })
}

/// Exact `max beta * weight - length^nu` over ordered subsets, by branch and
/// bound on the weight still available.
pub fn brute_force_heavy_tail(cloud: &PointCloud, beta: f64, nu: f64) -> Result<VariationalSolution> {
    require_positive("beta", beta)?;
    require_positive("nu", nu)?;
    let field = cloud.require_weighted()?;
    cap("heavy-tail brute force", field.len(), BRUTE_HEAVY_CAP)?;
    let pos: Vec<PlanarPoint> = field.iter().map(|p| p.position()).collect();
    let weight: Vec<f64> = field.iter().map(|p| p.w).collect();
    let mut s = HeavySearch {
        pos: &pos,
        weight: &weight,
        beta,
        nu,
        used: vec![false; pos.len()],
        path: Vec::new(),
        best: Vec::new(),
        best_value: 0.0,
    };
    let total: f64 = weight.iter().sum();
    s.dfs(&PlanarPoint::ORIGIN, 0.0, 0.0, total);
    let (value, energy, entropy) = evaluate(&pos, &weight, &s.best, beta, nu);
    Ok(VariationalSolution {
        value,
        chain: Chain::new(s.best),
        energy,
        entropy,
        method: Method::BruteForce,
    })
}

struct HeavySearch<'a> {
    pos: &'a [PlanarPoint],
    weight: &'a [f64],
    beta: f64,
    nu: f64,
    used: Vec<bool>,
    path: Vec<usize>,
    best: Vec<usize>,
    best_value: f64,
}

impl HeavySearch<'_> {
    fn dfs(&mut self, last: &PlanarPoint, len: f64, w: f64, remaining: f64) {
        let ent = len.powf(self.nu);
        let v = self.beta * w - ent;
        if v > self.best_value {
            self.best_value = v;
            self.best.clone_from(&self.path);
        }
        if self.beta * (w + remaining) - ent <= self.best_value {
            return;
        }
        for j in 0..self.pos.len() {
            if self.used[j] {
                continue;
            }
            self.used[j] = true;
            self.path.push(j);
            let q = self.pos[j];
            let wj = self.weight[j];
            self.dfs(&q, len + last.dist(&q), w + wj, remaining - wj);
            self.path.pop();
            self.used[j] = false;
        }
    }
}
