use super::{LppSolution, Method, Work};
use crate::constraints::{holder_norm_path, holder_ratio, Chain, ConstraintSpec, BUDGET_SLACK};
use crate::error::Result;
use crate::model::{DirectedPoint, PointCloud};

const NONE: u32 = u32::MAX;

/// Longest Hölder-compatible chain.
///
/// An edge `i -> j` exists iff `t_i < t_j` and `|x_j - x_i| <= A (t_j - t_i)^gamma`.
/// With `endpoint = Some(t)` the chain must also reach `(t, 0)`.
///
/// `gamma = 1` reduces to a longest non-decreasing subsequence in rotated
/// coordinates and `gamma = 0` to a sweep over a max segment tree; every other
/// exponent runs the quadratic DP with a backward scan that stops once no
/// earlier point can improve the current best.
pub fn solve_holder_exact(
    cloud: &PointCloud,
    gamma: f64,
    a_max: f64,
    endpoint: Option<f64>,
) -> Result<LppSolution> {
    let spec = ConstraintSpec::Holder { gamma, a_max };
    spec.validate()?;
    let pts = cloud.require_directed()?;
    let limit = a_max + BUDGET_SLACK;
    let ok = |dt: f64, dx: f64| dt > 0.0 && holder_ratio(dt, dx, gamma) <= limit;

    // For gamma >= 1, t^gamma is superadditive, so a point is reachable from
    // the origin (or reaches the terminal) only through the direct segment.
    let loose = limit * (1.0 + 1e-9);
    let cand: Vec<usize> = (0..pts.len())
        .filter(|&i| {
            let p = pts[i];
            if let Some(t) = endpoint {
                if !(p.t < t) {
                    return false;
                }
                if gamma >= 1.0 && holder_ratio(t - p.t, p.x, gamma) > loose {
                    return false;
                }
            }
            !(gamma >= 1.0 && holder_ratio(p.t, p.x, gamma) > loose)
        })
        .collect();
    let sub: Vec<DirectedPoint> = cand.iter().map(|&i| pts[i]).collect();
    let distinct_times = sub.windows(2).all(|w| w[0].t < w[1].t);

    let fast = if gamma == 1.0 && distinct_times {
        Some(rotated_lis(&sub, a_max, endpoint))
    } else if gamma == 0.0 {
        Some(sweep_constant_window(&sub, limit, endpoint))
    } else {
        None
    };
    let (local, work) = match fast {
        Some((chain, work)) if certified(&sub, &chain, gamma, limit, endpoint) => (chain, work),
        _ => general_dp(&sub, &ok, endpoint),
    };

    let indices: Vec<usize> = local.iter().map(|&k| cand[k]).collect();
    let chain = Chain {
        indices,
        from_origin: true,
        terminal: endpoint.map(|t| DirectedPoint::new(t, 0.0)),
    };
    let achieved = holder_norm_path(&chain.directed_path(cloud)?, gamma)?;
    Ok(LppSolution {
        cardinality: chain.len(),
        chain,
        achieved,
        method: Method::Exact,
        work,
    })
}

fn path_of(sub: &[DirectedPoint], chain: &[usize], endpoint: Option<f64>) -> Vec<DirectedPoint> {
    let mut path = vec![DirectedPoint::new(0.0, 0.0)];
    path.extend(chain.iter().map(|&k| sub[k]));
    path.extend(endpoint.map(|t| DirectedPoint::new(t, 0.0)));
    path
}

fn certified(sub: &[DirectedPoint], chain: &[usize], gamma: f64, limit: f64, endpoint: Option<f64>) -> bool {
    let path = path_of(sub, chain, endpoint);
    path.windows(2).all(|w| w[0].t < w[1].t)
        && holder_norm_path(&path, gamma).is_ok_and(|h| h <= limit)
}

fn backtrack(pred: &[u32], mut at: u32) -> Vec<usize> {
    let mut out = Vec::new();
    while at != NONE {
        out.push(at as usize);
        at = pred[at as usize];
    }
    out.reverse();
    out
}

/// Quadratic DP with pruned backward scan. `len[i] = 0` marks points no
/// compatible chain can reach.
fn general_dp(
    sub: &[DirectedPoint],
    ok: &dyn Fn(f64, f64) -> bool,
    endpoint: Option<f64>,
) -> (Vec<usize>, Work) {
    let n = sub.len();
    let mut len = vec![0u32; n];
    let mut pred = vec![NONE; n];
    let mut prefix_max = vec![0u32; n];
    let mut evaluations = 0u64;
    for i in 0..n {
        let p = sub[i];
        let mut best = u32::from(ok(p.t, p.x));
        let mut from = NONE;
        for j in (0..i).rev() {
            let need = best.max(1);
            if prefix_max[j] < need {
                break;
            }
            if len[j] >= need {
                let q = sub[j];
                evaluations += 1;
                if ok(p.t - q.t, p.x - q.x) {
                    best = len[j] + 1;
                    from = j as u32;
                }
            }
        }
        len[i] = best;
        pred[i] = if best > 0 { from } else { NONE };
        prefix_max[i] = if i == 0 { best } else { prefix_max[i - 1].max(best) };
    }
    let mut top = 0u32;
    let mut end = NONE;
    for i in 0..n {
        let closes = match endpoint {
            Some(t) => ok(t - sub[i].t, -sub[i].x),
            None => true,
        };
        if len[i] > top && closes {
            top = len[i];
            end = i as u32;
        }
    }
    let chain = if top == 0 { Vec::new() } else { backtrack(&pred, end) };
    (chain, Work { evaluations, states: n as u64 })
}

/// `gamma = 1`: with `u = A t + x`, `v = A t - x` an edge is `u_i <= u_j` and
/// `v_i <= v_j`, so the longest chain is a longest non-decreasing run of `v`
/// after sorting by `(u, v)`. Candidates are already filtered against the
/// origin and terminal cones.
fn rotated_lis(sub: &[DirectedPoint], a_max: f64, _endpoint: Option<f64>) -> (Vec<usize>, Work) {
    let n = sub.len();
    let uv: Vec<(f64, f64)> = sub.iter().map(|p| (a_max * p.t + p.x, a_max * p.t - p.x)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| uv[i].0.total_cmp(&uv[j].0).then(uv[i].1.total_cmp(&uv[j].1)));
    let mut tails: Vec<usize> = Vec::new();
    let mut pred = vec![NONE; n];
    let mut evaluations = 0u64;
    for &e in &order {
        let v = uv[e].1;
        let k = tails.partition_point(|&s| uv[s].1 <= v);
        evaluations += (usize::BITS - tails.len().leading_zeros()) as u64;
        if k > 0 {
            pred[e] = tails[k - 1] as u32;
        }
        if k == tails.len() {
            tails.push(e);
        } else {
            tails[k] = e;
        }
    }
    let chain = match tails.last() {
        Some(&last) => backtrack(&pred, last as u32),
        None => Vec::new(),
    };
    (chain, Work { evaluations, states: n as u64 })
}

/// `gamma = 0`: the constraint is `|dx| <= A` regardless of time, so a sweep in
/// time with a range-max structure over the rank of `x` finds each best
/// predecessor in logarithmic time. Points sharing a time are queried before
/// any of them is inserted.
fn sweep_constant_window(sub: &[DirectedPoint], limit: f64, endpoint: Option<f64>) -> (Vec<usize>, Work) {
    let n = sub.len();
    let mut by_x: Vec<usize> = (0..n).collect();
    by_x.sort_by(|&i, &j| sub[i].x.total_cmp(&sub[j].x).then(i.cmp(&j)));
    let mut rank = vec![0usize; n];
    for (r, &i) in by_x.iter().enumerate() {
        rank[i] = r;
    }
    let xs: Vec<f64> = by_x.iter().map(|&i| sub[i].x).collect();
    let mut tree = MaxTree::new(n);
    let mut len = vec![0u32; n];
    let mut pred = vec![NONE; n];
    let mut evaluations = 0u64;
    let mut start = 0;
    while start < n {
        let mut stop = start + 1;
        while stop < n && sub[stop].t == sub[start].t {
            stop += 1;
        }
        for i in start..stop {
            let x = sub[i].x;
            let lo = xs.partition_point(|&y| (x - y).abs() > limit && y < x);
            let hi = xs.partition_point(|&y| y <= x || (y - x).abs() <= limit);
            let (best, at) = tree.query(lo, hi);
            evaluations += 1;
            if best > 0 {
                len[i] = best + 1;
                pred[i] = at;
            } else if x.abs() <= limit {
                len[i] = 1;
            }
        }
        for i in start..stop {
            if len[i] > 0 {
                tree.update(rank[i], len[i], i as u32);
            }
        }
        start = stop;
    }
    let mut top = 0;
    let mut end = NONE;
    for i in 0..n {
        let closes = endpoint.is_none() || sub[i].x.abs() <= limit;
        if len[i] > top && closes {
            top = len[i];
            end = i as u32;
        }
    }
    let chain = if top == 0 { Vec::new() } else { backtrack(&pred, end) };
    (chain, Work { evaluations, states: n as u64 })
}

/// Iterative segment tree of `(len, index)` maxima; ties go to the smaller index.
struct MaxTree {
    size: usize,
    node: Vec<(u32, u32)>,
}

fn better(a: (u32, u32), b: (u32, u32)) -> (u32, u32) {
    if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
        a
    } else {
        b
    }
}

impl MaxTree {
    fn new(n: usize) -> Self {
        let size = n.next_power_of_two().max(1);
        MaxTree {
            size,
            node: vec![(0, NONE); 2 * size],
        }
    }

    fn update(&mut self, pos: usize, len: u32, idx: u32) {
        let mut k = pos + self.size;
        self.node[k] = better(self.node[k], (len, idx));
        while k > 1 {
            k /= 2;
            self.node[k] = better(self.node[2 * k], self.node[2 * k + 1]);
        }
    }

    /// Maximum over ranks `lo..hi`.
    fn query(&self, lo: usize, hi: usize) -> (u32, u32) {
        let mut acc = (0, NONE);
        let (mut l, mut r) = (lo + self.size, hi + self.size);
        while l < r {
            if l & 1 == 1 {
                acc = better(acc, self.node[l]);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                acc = better(acc, self.node[r]);
            }
            l /= 2;
            r /= 2;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::is_compatible;
    use crate::model::{sample_poisson_strip, sample_uniform_box, Domain};

    fn cloud(points: &[(f64, f64)]) -> PointCloud {
        let d = Domain::Box { t: 10.0, halfwidth: 10.0 };
        PointCloud::directed(d, points.iter().map(|&(t, x)| DirectedPoint::new(t, x)).collect()).unwrap()
    }

    #[test]
    fn trivial_clouds() {
        let empty = cloud(&[]);
        assert_eq!(solve_holder_exact(&empty, 1.0, 1.0, None).unwrap().cardinality, 0);
        let one = cloud(&[(1.0, 0.5)]);
        assert_eq!(solve_holder_exact(&one, 0.5, 0.5, None).unwrap().cardinality, 1);
        assert_eq!(solve_holder_exact(&one, 0.5, 0.49, None).unwrap().cardinality, 0);
    }

    #[test]
    fn staircase_is_collected() {
        let c = cloud(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0), (2.5, -1.0)]);
        for gamma in [0.0, 0.5, 1.0, 2.0] {
            let s = solve_holder_exact(&c, gamma, 1.0, None).unwrap();
            assert_eq!(s.cardinality, 3, "gamma {gamma}");
        }
    }

    #[test]
    fn fast_paths_agree_with_general_dp() {
        for seed in 0..20 {
            let c = sample_uniform_box(400, 1.0, 1.0, seed).unwrap();
            let sub = c.as_directed().unwrap().to_vec();
            for gamma in [0.0, 1.0] {
                let limit = 1.0 + BUDGET_SLACK;
                let ok = |dt: f64, dx: f64| dt > 0.0 && holder_ratio(dt, dx, gamma) <= limit;
                let (reference, _) = general_dp(&sub, &ok, None);
                let s = solve_holder_exact(&c, gamma, 1.0, None).unwrap();
                assert_eq!(s.cardinality, reference.len(), "seed {seed} gamma {gamma}");
            }
        }
    }

    #[test]
    fn point_to_point_chains_certify() {
        let c = sample_poisson_strip(1.0, 30.0, 10.0, 5).unwrap();
        for gamma in [0.0, 0.5, 1.0, 1.5] {
            let s = solve_holder_exact(&c, gamma, 1.0, Some(30.0)).unwrap();
            let spec = ConstraintSpec::Holder { gamma, a_max: 1.0 };
            assert!(is_compatible(&c, &s.chain, &spec).unwrap().compatible);
            assert_eq!(s.chain.terminal, Some(DirectedPoint::new(30.0, 0.0)));
        }
    }
}
