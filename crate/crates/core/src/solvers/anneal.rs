//! Simulated annealing over open paths from the origin.
//!
//! The state is an ordered list of visited points. Moves insert a point at its
//! cheapest position, delete one, replace one by a nearby unvisited point, or
//! reverse a segment. Both non-directed problems share this engine and differ
//! only in the energy they assign to `(count, collected weight, segment sum)`.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PlanarPoint;
use crate::rng::{derive_seed, rng_from_seed, Rng};

/// Annealing schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    /// Starting temperature; calibrated when `None` so that about 80% of
    /// uphill moves are accepted.
    pub initial_temperature: Option<f64>,
    /// Geometric cooling ratio.
    pub cooling: f64,
    /// Moves per temperature, as a multiple of the square root of the point
    /// count (the scale of an optimal path).
    pub sweeps: f64,
    /// The run stops once the temperature falls below this fraction of the start.
    pub final_ratio: f64,
    /// Relative weights of insert, delete, replace and segment-reverse moves.
    pub move_mix: [f64; 4],
    pub restarts: u32,
    /// Size of the nearest-neighbour lists proposals draw from.
    pub neighbours: usize,
    pub seed: u64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            initial_temperature: None,
            cooling: 0.97,
            sweeps: 200.0,
            final_ratio: 1e-3,
            move_mix: [0.4, 0.2, 0.2, 0.2],
            restarts: 8,
            neighbours: 10,
            seed: 0,
        }
    }
}

impl AnnealConfig {
    pub fn with_seed(seed: u64) -> Self {
        AnnealConfig { seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::param(format!("cooling ratio must lie in (0, 1), got {}", self.cooling)));
        }
        if !(self.final_ratio > 0.0 && self.final_ratio < 1.0) {
            return Err(Error::param(format!("final ratio must lie in (0, 1), got {}", self.final_ratio)));
        }
        if !(self.sweeps > 0.0 && self.sweeps.is_finite()) {
            return Err(Error::param(format!("sweeps must be positive, got {}", self.sweeps)));
        }
        if self.restarts == 0 || self.neighbours == 0 {
            return Err(Error::param("restarts and neighbour count must be at least 1"));
        }
        if self.move_mix.iter().any(|w| !(*w >= 0.0)) || self.move_mix.iter().sum::<f64>() <= 0.0 {
            return Err(Error::param("move mix weights must be non-negative with a positive sum"));
        }
        if let Some(t0) = self.initial_temperature {
            crate::error::require_positive("initial temperature", t0)?;
        }
        Ok(())
    }
}

/// `d^p` with `0^p = 0`, matching `constraints::planar_power_sum`.
#[inline]
pub(crate) fn seg(a: &PlanarPoint, b: &PlanarPoint, p: f64) -> f64 {
    let d = a.dist(b);
    if d > 0.0 {
        if p == 1.0 { d } else { d.powf(p) }
    } else {
        0.0
    }
}

/// `k` nearest points to each point, and to the origin in the last slot.
fn neighbour_lists(pos: &[PlanarPoint], k: usize) -> Vec<Vec<u32>> {
    let n = pos.len();
    let k = k.min(n.saturating_sub(1)).max(1).min(n);
    let mut out = Vec::with_capacity(n + 1);
    let mut scratch: Vec<(f64, u32)> = Vec::with_capacity(n);
    for i in 0..=n {
        let c = if i < n { pos[i] } else { PlanarPoint::ORIGIN };
        scratch.clear();
        scratch.extend((0..n).filter(|&j| j != i).map(|j| (c.dist(&pos[j]), j as u32)));
        let kk = k.min(scratch.len());
        if kk == 0 {
            out.push(Vec::new());
            continue;
        }
        let cmp = |a: &(f64, u32), b: &(f64, u32)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if kk < scratch.len() {
            scratch.select_nth_unstable_by(kk - 1, cmp);
        }
        let mut head = scratch[..kk].to_vec();
        head.sort_by(cmp);
        out.push(head.into_iter().map(|(_, j)| j).collect());
    }
    out
}

pub(crate) struct PathProblem<'a, E> {
    pub pos: &'a [PlanarPoint],
    pub weight: &'a [f64],
    pub power: f64,
    /// Energy of a path with the given count, weight sum and segment sum;
    /// `None` when the path is infeasible. The empty path must be feasible.
    pub energy: E,
}

#[derive(Clone, Debug)]
pub(crate) struct Annealed {
    pub path: Vec<usize>,
    pub energy: f64,
    pub moves: u64,
}

enum Move {
    Insert { c: usize, at: usize },
    Delete { at: usize },
    Replace { at: usize, c: usize },
    Reverse { i: usize, j: usize },
}

struct Walker<'a, E> {
    prob: &'a PathProblem<'a, E>,
    near: &'a [Vec<u32>],
    path: Vec<usize>,
    inside: Vec<bool>,
    w: f64,
    s: f64,
    e: f64,
}

impl<'a, E: Fn(usize, f64, f64) -> Option<f64>> Walker<'a, E> {
    fn new(prob: &'a PathProblem<'a, E>, near: &'a [Vec<u32>]) -> Self {
        let e = (prob.energy)(0, 0.0, 0.0).expect("the empty path is feasible");
        Walker {
            prob,
            near,
            path: Vec::new(),
            inside: vec![false; prob.pos.len()],
            w: 0.0,
            s: 0.0,
            e,
        }
    }

    fn point(&self, at: Option<usize>) -> &PlanarPoint {
        match at {
            Some(k) => &self.prob.pos[self.path[k]],
            None => &PlanarPoint::ORIGIN,
        }
    }

    /// Vertex before path slot `k` (the origin for `k = 0`).
    fn before(&self, k: usize) -> &PlanarPoint {
        if k == 0 { &PlanarPoint::ORIGIN } else { &self.prob.pos[self.path[k - 1]] }
    }

    fn after(&self, k: usize) -> Option<&PlanarPoint> {
        self.path.get(k + 1).map(|&i| &self.prob.pos[i])
    }

    fn recompute(&mut self) {
        let p = self.prob.power;
        let mut prev = PlanarPoint::ORIGIN;
        let mut s = 0.0;
        let mut w = 0.0;
        for &i in &self.path {
            s += seg(&prev, &self.prob.pos[i], p);
            w += self.prob.weight[i];
            prev = self.prob.pos[i];
        }
        self.s = s;
        self.w = w;
        self.e = (self.prob.energy)(self.path.len(), w, s).unwrap_or(f64::INFINITY);
    }

    fn pick_kind(&self, rng: &mut Rng, mix: &[f64; 4]) -> usize {
        let total: f64 = mix.iter().sum();
        let mut u = rng.random::<f64>() * total;
        for (k, w) in mix.iter().enumerate() {
            if u < *w {
                return k;
            }
            u -= w;
        }
        3
    }

    fn unvisited_near(&self, rng: &mut Rng, list: usize) -> Option<usize> {
        let near = &self.near[list];
        if near.is_empty() {
            return None;
        }
        let c = near[rng.random_range(0..near.len())] as usize;
        (!self.inside[c]).then_some(c)
    }

    /// Draws a move and returns it with the resulting `(count, w, s)`.
    fn propose(&self, rng: &mut Rng, mix: &[f64; 4]) -> Option<(Move, usize, f64, f64)> {
        let n = self.prob.pos.len();
        let len = self.path.len();
        let p = self.prob.power;
        let pos = self.prob.pos;
        match self.pick_kind(rng, mix) {
            0 => {
                if len == n {
                    return None;
                }
                let c = if rng.random::<bool>() {
                    let slot = rng.random_range(0..=len);
                    let list = if slot == len { n } else { self.path[slot] };
                    self.unvisited_near(rng, list)?
                } else {
                    let c = rng.random_range(0..n);
                    if self.inside[c] {
                        return None;
                    }
                    c
                };
                let q = &pos[c];
                let mut best = f64::INFINITY;
                let mut at = 0;
                for k in 0..=len {
                    let a = self.before(k);
                    let ds = match self.path.get(k) {
                        Some(&b) => seg(a, q, p) + seg(q, &pos[b], p) - seg(a, &pos[b], p),
                        None => seg(a, q, p),
                    };
                    if ds < best {
                        best = ds;
                        at = k;
                    }
                }
                Some((Move::Insert { c, at }, len + 1, self.w + self.prob.weight[c], self.s + best))
            }
            1 => {
                if len == 0 {
                    return None;
                }
                let at = rng.random_range(0..len);
                let a = self.before(at);
                let x = self.point(Some(at));
                let ds = match self.after(at) {
                    Some(b) => seg(a, b, p) - seg(a, x, p) - seg(x, b, p),
                    None => -seg(a, x, p),
                };
                let w = self.w - self.prob.weight[self.path[at]];
                Some((Move::Delete { at }, len - 1, w, self.s + ds))
            }
            2 => {
                if len == 0 {
                    return None;
                }
                let at = rng.random_range(0..len);
                let c = self.unvisited_near(rng, self.path[at])?;
                let a = self.before(at);
                let x = self.point(Some(at));
                let q = &pos[c];
                let mut ds = seg(a, q, p) - seg(a, x, p);
                if let Some(b) = self.after(at) {
                    ds += seg(q, b, p) - seg(x, b, p);
                }
                let w = self.w - self.prob.weight[self.path[at]] + self.prob.weight[c];
                Some((Move::Replace { at, c }, len, w, self.s + ds))
            }
            _ => {
                if len < 2 {
                    return None;
                }
                let i = rng.random_range(0..len - 1);
                let j = rng.random_range(i + 1..len);
                let a = self.before(i);
                let (pi, pj) = (self.point(Some(i)), self.point(Some(j)));
                let mut ds = seg(a, pj, p) - seg(a, pi, p);
                if let Some(b) = self.after(j) {
                    ds += seg(pi, b, p) - seg(pj, b, p);
                }
                Some((Move::Reverse { i, j }, len, self.w, self.s + ds))
            }
        }
    }

    fn apply(&mut self, mv: Move, w: f64, s: f64, e: f64) {
        match mv {
            Move::Insert { c, at } => {
                self.path.insert(at, c);
                self.inside[c] = true;
            }
            Move::Delete { at } => {
                let x = self.path.remove(at);
                self.inside[x] = false;
            }
            Move::Replace { at, c } => {
                self.inside[self.path[at]] = false;
                self.path[at] = c;
                self.inside[c] = true;
            }
            Move::Reverse { i, j } => self.path[i..=j].reverse(),
        }
        self.w = w;
        self.s = s;
        self.e = e;
    }
}

fn run_once<E>(prob: &PathProblem<'_, E>, near: &[Vec<u32>], cfg: &AnnealConfig, seed: u64) -> Annealed
where
    E: Fn(usize, f64, f64) -> Option<f64>,
{
    let mut rng = rng_from_seed(seed);
    let n = prob.pos.len();
    let per_temp = ((cfg.sweeps * (n as f64).sqrt()).ceil() as u64).max(1);
    let mut moves = 0u64;

    let t0 = match cfg.initial_temperature {
        Some(t) => t,
        None => {
            // random walk accepting every feasible move; collect uphill steps
            let mut w = Walker::new(prob, near);
            let mut ups = 0.0;
            let mut count = 0usize;
            for _ in 0..(2 * n).max(200) {
                if let Some((mv, len, ww, s)) = w.propose(&mut rng, &cfg.move_mix) {
                    if let Some(e) = (prob.energy)(len, ww, s) {
                        if e > w.e {
                            ups += e - w.e;
                            count += 1;
                        }
                        w.apply(mv, ww, s, e);
                    }
                }
            }
            moves += (2 * n).max(200) as u64;
            if count > 0 && ups > 0.0 {
                -(ups / count as f64) / 0.8f64.ln()
            } else {
                1.0
            }
        }
    };

    let mut w = Walker::new(prob, near);
    let mut best = Annealed { path: Vec::new(), energy: w.e, moves: 0 };
    let stop = t0 * cfg.final_ratio;
    let mut temp = t0;
    while temp > stop {
        for _ in 0..per_temp {
            moves += 1;
            let Some((mv, len, ww, s)) = w.propose(&mut rng, &cfg.move_mix) else {
                continue;
            };
            let Some(e) = (prob.energy)(len, ww, s) else {
                continue;
            };
            let de = e - w.e;
            if de <= 0.0 || rng.random::<f64>() < (-de / temp).exp() {
                w.apply(mv, ww, s, e);
                if w.e < best.energy {
                    best.energy = w.e;
                    best.path.clone_from(&w.path);
                }
            }
        }
        w.recompute();
        temp *= cfg.cooling;
    }
    best.moves = moves;
    best
}

/// Best path over all restarts; ties go to the lowest restart index. The
/// reported energy is recomputed from scratch.
pub(crate) fn anneal<E>(prob: &PathProblem<'_, E>, cfg: &AnnealConfig) -> Annealed
where
    E: Fn(usize, f64, f64) -> Option<f64> + Sync,
{
    let n = prob.pos.len();
    let empty_energy = (prob.energy)(0, 0.0, 0.0).expect("the empty path is feasible");
    if n == 0 {
        return Annealed { path: Vec::new(), energy: empty_energy, moves: 0 };
    }
    let near = neighbour_lists(prob.pos, cfg.neighbours);
    let runs: Vec<Annealed> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_once(prob, &near, cfg, derive_seed(cfg.seed, r as u64)))
        .collect();
    let moves = runs.iter().map(|r| r.moves).sum();
    let mut best: Option<Annealed> = None;
    for mut run in runs {
        run.energy = path_energy(prob, &run.path).unwrap_or(f64::INFINITY);
        if best.as_ref().is_none_or(|b| run.energy < b.energy) {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one restart");
    if !(best.energy <= empty_energy) {
        best.path.clear();
        best.energy = empty_energy;
    }
    best.moves = moves;
    best
}

pub(crate) fn path_energy<E>(prob: &PathProblem<'_, E>, path: &[usize]) -> Option<f64>
where
    E: Fn(usize, f64, f64) -> Option<f64>,
{
    let mut prev = PlanarPoint::ORIGIN;
    let (mut s, mut w) = (0.0, 0.0);
    for &i in path {
        s += seg(&prev, &prob.pos[i], prob.power);
        w += prob.weight[i];
        prev = prob.pos[i];
    }
    (prob.energy)(path.len(), w, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(AnnealConfig::default().validate().is_ok());
        let bad = AnnealConfig { cooling: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = AnnealConfig { restarts: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn neighbour_lists_are_sorted_by_distance() {
        let pos: Vec<PlanarPoint> = (0..6).map(|i| PlanarPoint::new(i as f64, 0.0)).collect();
        let near = neighbour_lists(&pos, 2);
        assert_eq!(near[0], vec![1, 2]);
        assert_eq!(near[3], vec![2, 4]);
        assert_eq!(near[6], vec![0, 1]);
    }

    #[test]
    fn collects_everything_when_free() {
        let pos: Vec<PlanarPoint> = (0..12).map(|i| PlanarPoint::new((i as f64).cos(), (i as f64).sin())).collect();
        let weight = vec![1.0; 12];
        let prob = PathProblem {
            pos: &pos,
            weight: &weight,
            power: 1.0,
            energy: |n: usize, _w: f64, s: f64| Some(-(n as f64) + 1e-3 * s),
        };
        let cfg = AnnealConfig { sweeps: 20.0, restarts: 2, ..AnnealConfig::with_seed(3) };
        let out = anneal(&prob, &cfg);
        assert_eq!(out.path.len(), 12);
    }
}
