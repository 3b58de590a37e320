use super::entropy::{General, Kernel, Quadratic};
use super::{Method, VariationalSolution};
use crate::constraints::{check_ab, entropy_path, Chain};
use crate::error::{require_non_negative, require_positive, Result};
use crate::model::{DirectedPoint, PointCloud};

/// Maximises `beta |D| - Ent_{a,b}(D + (t, 0))` over directed chains `D`.
///
/// `g(i) = beta + max(-cost(o, i), max_j g(j) - cost(j, i))` is the best
/// objective of a path from the origin ending at point `i`; the value is
/// `max(0, max_i g(i) - cost(i, (t, 0)))`, zero being the empty path.
pub fn solve_polymer_directed(cloud: &PointCloud, beta: f64, a: f64, b: f64, t: f64) -> Result<VariationalSolution> {
    require_non_negative("beta", beta)?;
    require_positive("t", t)?;
    check_ab(a, b)?;
    let pts = cloud.require_directed()?;
    let cand: Vec<usize> = (0..pts.len()).filter(|&i| pts[i].t < t).collect();
    let sub: Vec<DirectedPoint> = cand.iter().map(|&i| pts[i]).collect();
    let local = if a == 2.0 && b == 1.0 {
        dp(&sub, &Quadratic, beta, t)
    } else {
        dp(&sub, &General { a, b }, beta, t)
    };
    let chain = Chain::point_to_point(local.iter().map(|&k| cand[k]).collect(), t);
    let entropy = entropy_path(&chain.directed_path(cloud)?, a, b)?;
    let energy = chain.len() as f64;
    Ok(VariationalSolution {
        value: beta * energy - entropy,
        chain,
        energy,
        entropy,
        method: Method::Exact,
    })
}

fn dp<K: Kernel>(sub: &[DirectedPoint], kernel: &K, beta: f64, t: f64) -> Vec<usize> {
    let n = sub.len();
    let mut g = vec![f64::NEG_INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    for i in 0..n {
        let p = sub[i];
        let mut best = -kernel.cost(p.t, p.x);
        let mut from = usize::MAX;
        for j in 0..i {
            let q = sub[j];
            if q.t < p.t {
                let v = g[j] - kernel.cost(p.t - q.t, p.x - q.x);
                if v > best {
                    best = v;
                    from = j;
                }
            }
        }
        g[i] = beta + best;
        pred[i] = from;
    }
    let mut best = 0.0;
    let mut end = usize::MAX;
    for i in 0..n {
        let v = g[i] - kernel.cost(t - sub[i].t, -sub[i].x);
        if v > best {
            best = v;
            end = i;
        }
    }
    let mut chain = Vec::new();
    while end != usize::MAX {
        chain.push(end);
        end = pred[end];
    }
    chain.reverse();
    chain
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Domain;

    #[test]
    fn zero_beta_gives_empty_path() {
        let d = Domain::Box { t: 2.0, halfwidth: 1.0 };
        let c = PointCloud::directed(d, vec![DirectedPoint::new(1.0, 0.5)]).unwrap();
        let s = solve_polymer_directed(&c, 0.0, 2.0, 1.0, 2.0).unwrap();
        assert_eq!(s.value, 0.0);
        assert!(s.chain.is_empty());
    }

    #[test]
    fn axis_point_is_free() {
        let d = Domain::Box { t: 2.0, halfwidth: 1.0 };
        let c = PointCloud::directed(d, vec![DirectedPoint::new(1.0, 0.0)]).unwrap();
        let s = solve_polymer_directed(&c, 1.5, 2.0, 1.0, 2.0).unwrap();
        assert_eq!(s.value, 1.5);
        assert_eq!(s.entropy, 0.0);
    }
}
