use super::anneal::{anneal, AnnealConfig, PathProblem};
use super::nondir::HeldKarp;
use super::{Method, VariationalSolution};
use crate::constraints::{planar_power_sum, Chain};
use crate::error::{require_positive, Error, Result};
use crate::model::{PlanarPoint, PointCloud};

/// Largest annealed support that is re-optimised exactly.
pub const HEAVY_REFINE_CAP: usize = 18;

/// Annealed lower bound on `sup beta * (collected weight) - length^nu` over
/// open paths from the origin through a weighted cloud.
///
/// Once annealing settles, every subset of its support is re-optimised
/// exactly by Held–Karp when the support has at most [`HEAVY_REFINE_CAP`]
/// points. Proposals use nearest-neighbour ranks and the temperature is
/// calibrated from observed energy changes, so the procedure commutes with
/// the scaling `x -> c x`, `w -> c^nu w / beta`.
pub fn solve_heavy_tail_anneal(cloud: &PointCloud, beta: f64, nu: f64, config: &AnnealConfig) -> Result<VariationalSolution> {
    require_positive("beta", beta)?;
    if !(nu > 1.0 && nu.is_finite()) {
        return Err(Error::param(format!("nu must exceed 1, got {nu}")));
    }
    config.validate()?;
    let field = cloud.require_weighted()?;
    let pos: Vec<PlanarPoint> = field.iter().map(|p| p.position()).collect();
    let weight: Vec<f64> = field.iter().map(|p| p.w).collect();
    let prob = PathProblem {
        pos: &pos,
        weight: &weight,
        power: 1.0,
        energy: |_n: usize, w: f64, s: f64| Some(s.powf(nu) - beta * w),
    };
    let out = anneal(&prob, config);
    let mut path = out.path;
    if !path.is_empty() && path.len() <= HEAVY_REFINE_CAP {
        path = refine(&pos, &weight, &path, beta, nu);
    }
    let (value, energy, entropy) = evaluate(&pos, &weight, &path, beta, nu);
    Ok(VariationalSolution {
        value,
        chain: Chain::new(path),
        energy,
        entropy,
        method: Method::Anneal {
            cooling: config.cooling,
            sweeps: config.sweeps,
            restarts: config.restarts,
        },
    })
}

/// `(value, collected weight, length^nu)` of a path.
pub(crate) fn evaluate(pos: &[PlanarPoint], weight: &[f64], path: &[usize], beta: f64, nu: f64) -> (f64, f64, f64) {
    let seq: Vec<PlanarPoint> = path.iter().map(|&i| pos[i]).collect();
    let w: f64 = path.iter().map(|&i| weight[i]).sum();
    let ent = planar_power_sum(&seq, 1.0).powf(nu);
    (beta * w - ent, w, ent)
}

/// Best subset and order of `support`, exactly.
fn refine(pos: &[PlanarPoint], weight: &[f64], support: &[usize], beta: f64, nu: f64) -> Vec<usize> {
    let sub: Vec<PlanarPoint> = support.iter().map(|&i| pos[i]).collect();
    let hk = HeldKarp::build(&sub, 1.0, f64::INFINITY);
    let k = support.len();
    let mut best_value = evaluate(pos, weight, support, beta, nu).0;
    let mut best = support.to_vec();
    let mut wsum = vec![0.0; 1 << k];
    for mask in 1..(1usize << k) {
        let low = mask.trailing_zeros() as usize;
        wsum[mask] = wsum[mask & (mask - 1)] + weight[support[low]];
        let (s, j) = hk.best_end(mask);
        let v = beta * wsum[mask] - s.powf(nu);
        if v > best_value {
            let cand: Vec<usize> = hk.path(mask, j).into_iter().map(|l| support[l]).collect();
            // re-evaluate in path order so the reported value is exact
            let exact = evaluate(pos, weight, &cand, beta, nu).0;
            if exact > best_value {
                best_value = exact;
                best = cand;
            }
        }
    }
    if best_value < 0.0 {
        Vec::new()
    } else {
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Domain, WeightedPoint};

    #[test]
    fn single_point_lower_bound() {
        let d = Domain::WeightedWindow { radius: 2.0, wmin: 0.1 };
        let c = PointCloud::weighted(d, vec![WeightedPoint { w: 3.0, x: 1.0, y: 0.0 }]).unwrap();
        let cfg = AnnealConfig { sweeps: 50.0, restarts: 1, ..AnnealConfig::with_seed(2) };
        let s = solve_heavy_tail_anneal(&c, 1.0, 2.0, &cfg).unwrap();
        assert_eq!(s.value, 2.0);
        let s = solve_heavy_tail_anneal(&c, 0.2, 2.0, &cfg).unwrap();
        assert_eq!(s.value, 0.0);
        assert!(s.chain.is_empty());
    }
}
