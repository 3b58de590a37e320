use std::f64::consts::PI;

use rand::Rng as _;
use rand_distr::{Distribution, Poisson};

use super::{Domain, DirectedPoint, Model, PlanarPoint, PointCloud, Points, WeightedPoint};
use crate::error::{require_positive, Error, Result};
use crate::rng::{rng_from_seed, Rng};

/// Strip half-width `c * t^{2/3}` used for point-to-point runs.
pub fn default_window(t: f64, c: f64) -> f64 {
    c * t.powf(2.0 / 3.0)
}

/// Uniform on `(0, len]`, never exactly zero.
fn open_uniform(rng: &mut Rng, len: f64) -> f64 {
    len * (1.0 - rng.random::<f64>())
}

fn symmetric_uniform(rng: &mut Rng, half: f64) -> f64 {
    half * (2.0 * rng.random::<f64>() - 1.0)
}

fn directed_points(rng: &mut Rng, n: usize, t: f64, half: f64) -> Vec<DirectedPoint> {
    (0..n)
        .map(|_| {
            let tt = open_uniform(rng, t);
            let x = symmetric_uniform(rng, half);
            DirectedPoint::new(tt, x)
        })
        .collect()
}

fn poisson_count(rng: &mut Rng, mean: f64) -> Result<usize> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::param(format!("poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as usize)
}

fn disk_point(rng: &mut Rng, r: f64) -> PlanarPoint {
    let rho = r * rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    // clamp guards the rare case where cos/sin rounding pushes the norm above r
    let p = PlanarPoint::new(rho * theta.cos(), rho * theta.sin());
    if p.norm() <= r {
        p
    } else {
        let s = r / p.norm();
        PlanarPoint::new(p.x * s, p.y * s)
    }
}

/// `m` i.i.d. uniform points in `[0, t] x [-x, x]`, sorted by time.
pub fn sample_uniform_box(m: usize, t: f64, x: f64, seed: u64) -> Result<PointCloud> {
    require_positive("t", t)?;
    require_positive("x", x)?;
    let mut rng = rng_from_seed(seed);
    let points = directed_points(&mut rng, m, t, x);
    Ok(PointCloud::from_parts(
        Domain::Box { t, halfwidth: x },
        Model::Uniform { m: m as u64 },
        seed,
        None,
        Points::Directed(points),
    ))
}

/// Poisson process of intensity `lambda` on `[0, t] x [-window, window]`.
pub fn sample_poisson_strip(lambda: f64, t: f64, window: f64, seed: u64) -> Result<PointCloud> {
    require_positive("lambda", lambda)?;
    require_positive("t", t)?;
    require_positive("window", window)?;
    let mut rng = rng_from_seed(seed);
    let n = poisson_count(&mut rng, 2.0 * lambda * t * window)?;
    let points = directed_points(&mut rng, n, t, window);
    Ok(PointCloud::from_parts(
        Domain::Strip { t, window },
        Model::Poisson { lambda },
        seed,
        None,
        Points::Directed(points),
    ))
}

/// `m` i.i.d. uniform points in the disk of radius `r`.
pub fn sample_uniform_disk(m: usize, r: f64, seed: u64) -> Result<PointCloud> {
    require_positive("r", r)?;
    let mut rng = rng_from_seed(seed);
    let points = (0..m).map(|_| disk_point(&mut rng, r)).collect();
    Ok(PointCloud::from_parts(
        Domain::Disk { r },
        Model::Uniform { m: m as u64 },
        seed,
        None,
        Points::Planar(points),
    ))
}

/// Poisson field with intensity `alpha/2 w^{-alpha-1} dw dx dy`, restricted to
/// positions in the disk of radius `radius` and weights `w >= wmin`.
///
/// The count is Poisson with mean `pi radius^2 wmin^{-alpha} / 2`; weights are
/// Pareto(`alpha`) with scale `wmin`.
pub fn sample_heavy_tail_field(alpha: f64, radius: f64, wmin: f64, seed: u64) -> Result<PointCloud> {
    require_positive("alpha", alpha)?;
    require_positive("radius", radius)?;
    require_positive("wmin", wmin)?;
    let mut rng = rng_from_seed(seed);
    let mean = PI * radius * radius * wmin.powf(-alpha) / 2.0;
    let n = poisson_count(&mut rng, mean)?;
    let points = (0..n)
        .map(|_| {
            let u = 1.0 - rng.random::<f64>();
            let w = (wmin * u.powf(-1.0 / alpha)).max(wmin);
            let p = disk_point(&mut rng, radius);
            WeightedPoint { w, x: p.x, y: p.y }
        })
        .collect();
    Ok(PointCloud::from_parts(
        Domain::WeightedWindow { radius, wmin },
        Model::HeavyTail { alpha },
        seed,
        None,
        Points::Weighted(points),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_box() {
        let c = sample_uniform_box(0, 1.0, 1.0, 1).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn bad_parameters() {
        assert!(sample_uniform_box(3, 0.0, 1.0, 1).is_err());
        assert!(sample_uniform_box(3, 1.0, -1.0, 1).is_err());
        assert!(sample_poisson_strip(0.0, 1.0, 1.0, 1).is_err());
        assert!(sample_uniform_disk(3, 0.0, 1).is_err());
        assert!(sample_heavy_tail_field(0.0, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn box_time_mean_matches_uniform() {
        let c = sample_uniform_box(1000, 1.0, 1.0, 2024).unwrap();
        let pts = c.as_directed().unwrap();
        let mean = pts.iter().map(|p| p.t).sum::<f64>() / 1000.0;
        let tol = 3.0 * (1.0 / 12f64.sqrt()) / 1000f64.sqrt();
        assert!((mean - 0.5).abs() <= tol, "mean {mean}");
        assert!(pts.windows(2).all(|w| w[0].t < w[1].t));
        assert!(pts.iter().all(|p| c.domain().contains_directed(p)));
    }

    #[test]
    fn vanishing_strip_is_empty() {
        let c = sample_poisson_strip(1.0, 1.0, 1e-9, 9).unwrap();
        assert_eq!(c.len(), 0);
    }

    #[test]
    fn disk_points_inside() {
        let c = sample_uniform_disk(5000, 2.5, 4).unwrap();
        assert!(c.as_planar().unwrap().iter().all(|p| p.norm() <= 2.5));
    }

    #[test]
    fn weights_respect_cutoff() {
        let c = sample_heavy_tail_field(1.2, 3.0, 0.3, 8).unwrap();
        assert!(c.as_weighted().unwrap().iter().all(|p| p.w >= 0.3 && p.position().norm() <= 3.0));
    }
}
