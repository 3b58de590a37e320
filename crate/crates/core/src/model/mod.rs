//! Point processes, sampling domains and the measure-preserving scaling maps.

mod io;
mod sample;

pub use io::{read_cloud, write_cloud, CLOUD_FORMAT_VERSION, CLOUD_MAGIC};
pub use sample::{
    default_window, sample_heavy_tail_field, sample_poisson_strip, sample_uniform_box,
    sample_uniform_disk,
};

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

/// A space-time point `(t, x)` with `t > 0`. The origin is implicit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectedPoint {
    pub t: f64,
    pub x: f64,
}

impl DirectedPoint {
    pub fn new(t: f64, x: f64) -> Self {
        DirectedPoint { t, x }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub fn new(x: f64, y: f64) -> Self {
        PlanarPoint { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(&self, other: &PlanarPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub const ORIGIN: PlanarPoint = PlanarPoint { x: 0.0, y: 0.0 };
}

/// A planar point carrying a positive weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub w: f64,
    pub x: f64,
    pub y: f64,
}

impl WeightedPoint {
    pub fn position(&self) -> PlanarPoint {
        PlanarPoint::new(self.x, self.y)
    }
}

/// Sampling region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// `[0, t] x [-halfwidth, halfwidth]`.
    Box { t: f64, halfwidth: f64 },
    /// The half-plane `[0, t] x R` truncated to `|x| <= window`.
    Strip { t: f64, window: f64 },
    /// Centred disk of radius `r`.
    Disk { r: f64 },
    /// Disk of radius `radius` for positions, weights restricted to `w >= wmin`.
    WeightedWindow { radius: f64, wmin: f64 },
}

impl Domain {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Domain::Box { t, halfwidth } => {
                require_positive("t", t)?;
                require_positive("halfwidth", halfwidth)
            }
            Domain::Strip { t, window } => {
                require_positive("t", t)?;
                require_positive("window", window)
            }
            Domain::Disk { r } => require_positive("r", r),
            Domain::WeightedWindow { radius, wmin } => {
                require_positive("radius", radius)?;
                require_positive("wmin", wmin)
            }
        }
    }

    /// Time horizon of a directed domain.
    pub fn horizon(&self) -> Option<f64> {
        match *self {
            Domain::Box { t, .. } | Domain::Strip { t, .. } => Some(t),
            _ => None,
        }
    }

    /// Half-width in `x` of a directed domain.
    pub fn halfwidth(&self) -> Option<f64> {
        match *self {
            Domain::Box { halfwidth, .. } => Some(halfwidth),
            Domain::Strip { window, .. } => Some(window),
            _ => None,
        }
    }

    pub fn is_directed(&self) -> bool {
        matches!(self, Domain::Box { .. } | Domain::Strip { .. })
    }

    /// Lebesgue measure of the spatial region.
    pub fn area(&self) -> f64 {
        match *self {
            Domain::Box { t, halfwidth } => 2.0 * t * halfwidth,
            Domain::Strip { t, window } => 2.0 * t * window,
            Domain::Disk { r } => std::f64::consts::PI * r * r,
            Domain::WeightedWindow { radius, .. } => std::f64::consts::PI * radius * radius,
        }
    }

    pub fn contains_directed(&self, p: &DirectedPoint) -> bool {
        match (self.horizon(), self.halfwidth()) {
            (Some(t), Some(w)) => p.t > 0.0 && p.t <= t && p.x.abs() <= w,
            _ => false,
        }
    }

    pub fn contains_planar(&self, p: &PlanarPoint) -> bool {
        match *self {
            Domain::Disk { r } => p.norm() <= r,
            Domain::WeightedWindow { radius, .. } => p.norm() <= radius,
            _ => false,
        }
    }

    pub fn contains_weighted(&self, p: &WeightedPoint) -> bool {
        match *self {
            Domain::WeightedWindow { radius, wmin } => p.w >= wmin && p.position().norm() <= radius,
            _ => false,
        }
    }
}

/// The law a cloud was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    /// `m` i.i.d. uniform points.
    Uniform { m: u64 },
    /// Poisson process of intensity `lambda`.
    Poisson { lambda: f64 },
    /// Weighted Poisson field with Pareto(alpha) weights.
    HeavyTail { alpha: f64 },
    /// Points supplied by the caller.
    Explicit,
}

/// Cumulative `(t, x)` factors applied by scaling maps since sampling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transform {
    pub time_factor: f64,
    pub space_factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "points", rename_all = "snake_case")]
pub enum Points {
    Directed(Vec<DirectedPoint>),
    Planar(Vec<PlanarPoint>),
    Weighted(Vec<WeightedPoint>),
}

impl Points {
    pub fn len(&self) -> usize {
        match self {
            Points::Directed(p) => p.len(),
            Points::Planar(p) => p.len(),
            Points::Weighted(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// An immutable sampled configuration.
///
/// Directed clouds are kept sorted by `t`, ties broken by `x` and then by
/// input order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    domain: Domain,
    model: Model,
    seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transform: Option<Transform>,
    points: Points,
}

fn directed_order(a: &DirectedPoint, b: &DirectedPoint) -> Ordering {
    a.t.total_cmp(&b.t).then(a.x.total_cmp(&b.x))
}

impl PointCloud {
    /// Builds a directed cloud from arbitrary points, sorting them and checking
    /// domain membership.
    pub fn directed(domain: Domain, mut points: Vec<DirectedPoint>) -> Result<Self> {
        Self::check_directed(domain, &mut points)?;
        Ok(PointCloud {
            domain,
            model: Model::Explicit,
            seed: 0,
            transform: None,
            points: Points::Directed(points),
        })
    }

    fn check_directed(domain: Domain, points: &mut [DirectedPoint]) -> Result<()> {
        domain.validate()?;
        if !domain.is_directed() {
            return Err(Error::Usage("directed points need a box or strip domain".into()));
        }
        if let Some(p) = points.iter().find(|p| !domain.contains_directed(p)) {
            return Err(Error::param(format!("point ({}, {}) lies outside {domain:?}", p.t, p.x)));
        }
        // stable, so exact ties keep input order
        points.sort_by(directed_order);
        Ok(())
    }

    pub fn planar(domain: Domain, points: Vec<PlanarPoint>) -> Result<Self> {
        domain.validate()?;
        if let Some(p) = points.iter().find(|p| !domain.contains_planar(p)) {
            return Err(Error::param(format!("point ({}, {}) lies outside {domain:?}", p.x, p.y)));
        }
        Ok(PointCloud {
            domain,
            model: Model::Explicit,
            seed: 0,
            transform: None,
            points: Points::Planar(points),
        })
    }

    pub fn weighted(domain: Domain, points: Vec<WeightedPoint>) -> Result<Self> {
        domain.validate()?;
        if let Some(p) = points.iter().find(|p| !domain.contains_weighted(p)) {
            return Err(Error::param(format!(
                "point (w={}, {}, {}) lies outside {domain:?}",
                p.w, p.x, p.y
            )));
        }
        Ok(PointCloud {
            domain,
            model: Model::Explicit,
            seed: 0,
            transform: None,
            points: Points::Weighted(points),
        })
    }

    pub(crate) fn from_parts(
        domain: Domain,
        model: Model,
        seed: u64,
        transform: Option<Transform>,
        mut points: Points,
    ) -> Self {
        if let Points::Directed(p) = &mut points {
            p.sort_by(directed_order);
        }
        PointCloud {
            domain,
            model,
            seed,
            transform,
            points,
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn transform(&self) -> Option<&Transform> {
        self.transform.as_ref()
    }

    pub fn points(&self) -> &Points {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn as_directed(&self) -> Option<&[DirectedPoint]> {
        match &self.points {
            Points::Directed(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_planar(&self) -> Option<&[PlanarPoint]> {
        match &self.points {
            Points::Planar(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_weighted(&self) -> Option<&[WeightedPoint]> {
        match &self.points {
            Points::Weighted(p) => Some(p),
            _ => None,
        }
    }

    pub(crate) fn require_directed(&self) -> Result<&[DirectedPoint]> {
        self.as_directed()
            .ok_or_else(|| Error::Usage("operation needs a directed cloud".into()))
    }

    pub(crate) fn require_planar(&self) -> Result<&[PlanarPoint]> {
        self.as_planar()
            .ok_or_else(|| Error::Usage("operation needs a planar cloud".into()))
    }

    pub(crate) fn require_weighted(&self) -> Result<&[WeightedPoint]> {
        self.as_weighted()
            .ok_or_else(|| Error::Usage("operation needs a weighted cloud".into()))
    }

    /// Applies `(t, x) -> (time_factor * t, space_factor * x)` to a directed cloud.
    pub fn scale_directed(&self, time_factor: f64, space_factor: f64) -> Result<PointCloud> {
        require_positive("time factor", time_factor)?;
        require_positive("space factor", space_factor)?;
        let pts = self.require_directed()?;
        let points = pts
            .iter()
            .map(|p| DirectedPoint::new(p.t * time_factor, p.x * space_factor))
            .collect();
        let domain = match self.domain {
            Domain::Box { t, halfwidth } => Domain::Box {
                t: t * time_factor,
                halfwidth: halfwidth * space_factor,
            },
            Domain::Strip { t, window } => Domain::Strip {
                t: t * time_factor,
                window: window * space_factor,
            },
            other => other,
        };
        let prev = self.transform.unwrap_or(Transform {
            time_factor: 1.0,
            space_factor: 1.0,
        });
        Ok(PointCloud {
            domain,
            model: self.model,
            seed: self.seed,
            transform: Some(Transform {
                time_factor: prev.time_factor * time_factor,
                space_factor: prev.space_factor * space_factor,
            }),
            points: Points::Directed(points),
        })
    }

    /// Restriction to `t0 < t <= t1`, shifted so that `t0` becomes the origin.
    pub fn time_window(&self, t0: f64, t1: f64) -> Result<PointCloud> {
        if !(t1 > t0) {
            return Err(Error::param(format!("empty time window ({t0}, {t1}]")));
        }
        let pts = self.require_directed()?;
        let points: Vec<DirectedPoint> = pts
            .iter()
            .filter(|p| p.t > t0 && p.t <= t1)
            .map(|p| DirectedPoint::new(p.t - t0, p.x))
            .collect();
        let domain = match self.domain {
            Domain::Box { halfwidth, .. } => Domain::Box {
                t: t1 - t0,
                halfwidth,
            },
            Domain::Strip { window, .. } => Domain::Strip { t: t1 - t0, window },
            other => other,
        };
        Ok(PointCloud {
            domain,
            model: self.model,
            seed: self.seed,
            transform: self.transform,
            points: Points::Directed(points),
        })
    }
}

/// Hölder scaling map `(t, x) -> (f^{1/(1+gamma)} t, f^{gamma/(1+gamma)} x)`.
///
/// Leaves every chain's Hölder norm unchanged and maps a Poisson process of
/// intensity `f` onto one of intensity 1.
pub fn scale_holder(cloud: &PointCloud, factor: f64, gamma: f64) -> Result<PointCloud> {
    require_positive("scaling factor", factor)?;
    crate::error::require_non_negative("gamma", gamma)?;
    let tf = factor.powf(1.0 / (1.0 + gamma));
    let xf = factor.powf(gamma / (1.0 + gamma));
    cloud.scale_directed(tf, xf)
}

/// Entropy scaling map `(t, x) -> (f^{a/(a+b+1)} t, f^{(b+1)/(a+b+1)} x)`.
///
/// Multiplies every chain's `(a, b)`-entropy, and the horizon, by `f^{a/(a+b+1)}`.
pub fn scale_entropy(cloud: &PointCloud, factor: f64, a: f64, b: f64) -> Result<PointCloud> {
    require_positive("scaling factor", factor)?;
    let s = a + b + 1.0;
    cloud.scale_directed(factor.powf(a / s), factor.powf((b + 1.0) / s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_cloud_sorts_and_breaks_ties_by_x() {
        let d = Domain::Box { t: 1.0, halfwidth: 1.0 };
        let c = PointCloud::directed(
            d,
            vec![
                DirectedPoint::new(0.5, 0.2),
                DirectedPoint::new(0.1, 0.0),
                DirectedPoint::new(0.5, -0.3),
            ],
        )
        .unwrap();
        let p = c.as_directed().unwrap();
        assert_eq!(p[0], DirectedPoint::new(0.1, 0.0));
        assert_eq!(p[1], DirectedPoint::new(0.5, -0.3));
        assert_eq!(p[2], DirectedPoint::new(0.5, 0.2));
    }

    #[test]
    fn outside_points_are_rejected() {
        let d = Domain::Box { t: 1.0, halfwidth: 1.0 };
        assert!(PointCloud::directed(d, vec![DirectedPoint::new(2.0, 0.0)]).is_err());
        assert!(PointCloud::directed(d, vec![DirectedPoint::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn time_window_shifts_and_filters() {
        let d = Domain::Strip { t: 3.0, window: 1.0 };
        let c = PointCloud::directed(
            d,
            vec![DirectedPoint::new(0.5, 0.0), DirectedPoint::new(1.5, 0.1), DirectedPoint::new(2.5, 0.2)],
        )
        .unwrap();
        let w = c.time_window(1.0, 3.0).unwrap();
        assert_eq!(w.domain().horizon(), Some(2.0));
        assert_eq!(w.as_directed().unwrap(), &[DirectedPoint::new(0.5, 0.1), DirectedPoint::new(1.5, 0.2)]);
    }

    #[test]
    fn holder_scaling_with_unit_factor_is_identity() {
        let c = sample_uniform_box(50, 2.0, 1.0, 3).unwrap();
        let s = scale_holder(&c, 1.0, 0.7).unwrap();
        assert_eq!(s.as_directed(), c.as_directed());
        assert_eq!(s.domain(), c.domain());
    }

    #[test]
    fn scaling_composes_to_identity() {
        let c = sample_uniform_box(200, 3.0, 2.0, 11).unwrap();
        let back = scale_holder(&scale_holder(&c, 7.3, 1.5).unwrap(), 1.0 / 7.3, 1.5).unwrap();
        for (p, q) in c.as_directed().unwrap().iter().zip(back.as_directed().unwrap()) {
            assert!(((p.t - q.t) / p.t).abs() <= 1e-12);
            assert!((p.x - q.x).abs() <= 1e-12 * p.x.abs().max(1e-300));
        }
        assert_eq!(back.len(), c.len());
    }

    #[test]
    fn scaling_keeps_order_and_annotates() {
        let c = sample_uniform_box(300, 1.0, 1.0, 5).unwrap();
        let s = scale_entropy(&c, 16.0, 2.0, 1.0).unwrap();
        let pts = s.as_directed().unwrap();
        assert!(pts.windows(2).all(|w| w[0].t < w[1].t));
        assert_eq!(s.seed(), c.seed());
        assert_eq!(s.model(), c.model());
        let tr = s.transform().unwrap();
        assert!((tr.time_factor - 4.0).abs() < 1e-15);
        assert!((s.domain().horizon().unwrap() - 4.0).abs() < 1e-15);
    }
}
