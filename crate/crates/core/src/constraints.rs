//! Norms and entropies of chains.
//!
//! A directed chain visits cloud points in increasing time, starting at the
//! implicit origin `(0, 0)` and optionally ending at a terminal `(t, 0)`. The
//! functionals here are all segment-local: the Hölder norm is a max over
//! consecutive segments, the entropy is a sum.

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::model::{DirectedPoint, PlanarPoint, PointCloud};

/// Absolute slack for every budget comparison.
pub const BUDGET_SLACK: f64 = 1e-12;

/// An ordered selection of cloud points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub indices: Vec<usize>,
    /// Prepend the origin `(0, 0)`.
    pub from_origin: bool,
    /// Directed terminal point, usually `(t, 0)` for point-to-point problems.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal: Option<DirectedPoint>,
}

impl Chain {
    pub fn new(indices: Vec<usize>) -> Self {
        Chain {
            indices,
            from_origin: true,
            terminal: None,
        }
    }

    pub fn empty() -> Self {
        Chain::new(Vec::new())
    }

    /// Chain forced to end at `(t, 0)`.
    pub fn point_to_point(indices: Vec<usize>, t: f64) -> Self {
        Chain {
            indices,
            from_origin: true,
            terminal: Some(DirectedPoint::new(t, 0.0)),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn check_indices(&self, m: usize) -> Result<()> {
        let mut seen = vec![false; m];
        for &i in &self.indices {
            if i >= m {
                return Err(Error::Usage(format!("chain index {i} out of range for {m} points")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::Usage(format!("chain index {i} repeated")));
            }
        }
        Ok(())
    }

    /// The full directed polyline: origin, selected points, terminal.
    pub fn directed_path(&self, cloud: &PointCloud) -> Result<Vec<DirectedPoint>> {
        let pts = cloud.require_directed()?;
        self.check_indices(pts.len())?;
        let mut path = Vec::with_capacity(self.len() + 2);
        if self.from_origin {
            path.push(DirectedPoint::new(0.0, 0.0));
        }
        path.extend(self.indices.iter().map(|&i| pts[i]));
        path.extend(self.terminal);
        Ok(path)
    }

    /// Selected planar points in visiting order, origin not included.
    pub fn planar_sequence(&self, cloud: &PointCloud) -> Result<Vec<PlanarPoint>> {
        let pts = cloud.require_planar()?;
        self.check_indices(pts.len())?;
        Ok(self.indices.iter().map(|&i| pts[i]).collect())
    }
}

/// Budgeted constraint families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintSpec {
    /// `H_gamma <= a_max`.
    Holder { gamma: f64, a_max: f64 },
    /// `Ent_{a,b} <= budget`.
    Entropy { a: f64, b: f64, budget: f64 },
    /// Non-directed entropy at horizon `t`.
    NonDirEntropy { a: f64, b: f64, budget: f64, t: f64 },
    /// Non-directed Hölder norm at horizon `t`.
    NonDirHolder { gamma: f64, a_max: f64, t: f64 },
}

impl ConstraintSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ConstraintSpec::Holder { gamma, a_max } => {
                require_non_negative("gamma", gamma)?;
                require_positive("A", a_max)
            }
            ConstraintSpec::Entropy { a, b, budget } => {
                check_ab(a, b)?;
                require_non_negative("B", budget)
            }
            ConstraintSpec::NonDirEntropy { a, b, budget, t } => {
                check_ab(a, b)?;
                require_non_negative("B", budget)?;
                require_positive("t", t)
            }
            ConstraintSpec::NonDirHolder { gamma, a_max, t } => {
                require_positive("gamma", gamma)?;
                require_positive("A", a_max)?;
                require_positive("t", t)
            }
        }
    }

    pub fn is_directed(&self) -> bool {
        matches!(self, ConstraintSpec::Holder { .. } | ConstraintSpec::Entropy { .. })
    }

    /// The budget the functional is compared against.
    pub fn budget(&self) -> f64 {
        match *self {
            ConstraintSpec::Holder { a_max, .. } | ConstraintSpec::NonDirHolder { a_max, .. } => a_max,
            ConstraintSpec::Entropy { budget, .. } | ConstraintSpec::NonDirEntropy { budget, .. } => budget,
        }
    }
}

/// Entropy parameters need `a >= b >= 0` and `a > 0`.
pub(crate) fn check_ab(a: f64, b: f64) -> Result<()> {
    require_positive("a", a)?;
    require_non_negative("b", b)?;
    if b > a {
        return Err(Error::param(format!("entropy needs a >= b, got a={a}, b={b}")));
    }
    Ok(())
}

/// `|dx| / dt^gamma` for one segment.
pub fn holder_ratio(dt: f64, dx: f64, gamma: f64) -> f64 {
    dx.abs() / dt.powf(gamma)
}

/// `|dx|^a / dt^b` for one segment, with `0^a = 0`.
///
/// Integer exponents 0, 1, 2 avoid `powf` so that the specialised solver
/// kernels reproduce this value bit for bit.
pub fn entropy_cost(dt: f64, dx: f64, a: f64, b: f64) -> f64 {
    if dx == 0.0 {
        return 0.0;
    }
    let num = if a == 2.0 {
        dx * dx
    } else if a == 1.0 {
        dx.abs()
    } else {
        dx.abs().powf(a)
    };
    if b == 0.0 {
        num
    } else if b == 1.0 {
        num / dt
    } else {
        num / dt.powf(b)
    }
}

/// Hölder norm of a polyline given explicitly, first vertex included.
pub fn holder_norm_path(path: &[DirectedPoint], gamma: f64) -> Result<f64> {
    let mut best = 0.0f64;
    for w in path.windows(2) {
        let dt = w[1].t - w[0].t;
        if dt <= 0.0 {
            return Err(Error::Degenerate(format!(
                "time increment {dt} between t={} and t={}",
                w[0].t, w[1].t
            )));
        }
        best = best.max(holder_ratio(dt, w[1].x - w[0].x, gamma));
    }
    Ok(best)
}

/// `(a, b)`-entropy of a polyline given explicitly, first vertex included.
pub fn entropy_path(path: &[DirectedPoint], a: f64, b: f64) -> Result<f64> {
    let mut sum = 0.0;
    for w in path.windows(2) {
        let dt = w[1].t - w[0].t;
        let dx = w[1].x - w[0].x;
        if dt < 0.0 || (dt == 0.0 && b > 0.0 && dx != 0.0) {
            return Err(Error::Degenerate(format!(
                "time increment {dt} with space increment {dx}"
            )));
        }
        sum += if dt == 0.0 { entropy_cost(1.0, dx, a, 0.0) } else { entropy_cost(dt, dx, a, b) };
    }
    Ok(sum)
}

pub fn holder_norm(cloud: &PointCloud, chain: &Chain, gamma: f64) -> Result<f64> {
    require_non_negative("gamma", gamma)?;
    holder_norm_path(&chain.directed_path(cloud)?, gamma)
}

pub fn entropy_ab(cloud: &PointCloud, chain: &Chain, a: f64, b: f64) -> Result<f64> {
    check_ab(a, b)?;
    entropy_path(&chain.directed_path(cloud)?, a, b)
}

/// `sum ||x_i - x_{i-1}||^p` along origin then `seq`.
pub fn planar_power_sum(seq: &[PlanarPoint], p: f64) -> f64 {
    let mut prev = PlanarPoint::ORIGIN;
    let mut sum = 0.0;
    for q in seq {
        let d = prev.dist(q);
        if d > 0.0 {
            sum += d.powf(p);
        }
        prev = *q;
    }
    sum
}

/// Minimal entropy of a path through `seq` (in order) over all time subdivisions of `[0, t]`.
pub fn nondir_entropy(t: f64, seq: &[PlanarPoint], a: f64, b: f64) -> Result<f64> {
    require_positive("t", t)?;
    check_ab(a, b)?;
    let s = planar_power_sum(seq, a / (b + 1.0));
    Ok(t.powf(-b) * s.powf(b + 1.0))
}

/// The subdivision attaining [`nondir_entropy`], as time increments summing to `t`.
pub fn optimal_subdivision(t: f64, seq: &[PlanarPoint], a: f64, b: f64) -> Result<Vec<f64>> {
    require_positive("t", t)?;
    check_ab(a, b)?;
    let p = a / (b + 1.0);
    let mut prev = PlanarPoint::ORIGIN;
    let weights: Vec<f64> = seq
        .iter()
        .map(|q| {
            let d = prev.dist(q);
            prev = *q;
            if d > 0.0 { d.powf(p) } else { 0.0 }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::Degenerate("every segment has zero length".into()));
    }
    let mut incs: Vec<f64> = weights.iter().map(|w| t * w / total).collect();
    let n = incs.len();
    let head: f64 = incs[..n - 1].iter().sum();
    incs[n - 1] = t - head;
    Ok(incs)
}

/// `t^{-gamma} (sum ||x_i - x_{i-1}||^{1/gamma})^gamma`.
pub fn nondir_holder(t: f64, seq: &[PlanarPoint], gamma: f64) -> Result<f64> {
    require_positive("t", t)?;
    if !(gamma > 0.0) {
        return Err(Error::param("non-directed Hölder norm is undefined for gamma = 0"));
    }
    let s = planar_power_sum(seq, 1.0 / gamma);
    Ok(t.powf(-gamma) * s.powf(gamma))
}

/// Result of a compatibility check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Compatibility {
    pub compatible: bool,
    /// The achieved norm or entropy; `+inf` for chains with tied times.
    pub value: f64,
}

/// Whether `chain` satisfies `spec`, with the achieved value.
///
/// Directed chains with a repeated time are reported incompatible.
pub fn is_compatible(cloud: &PointCloud, chain: &Chain, spec: &ConstraintSpec) -> Result<Compatibility> {
    spec.validate()?;
    let value = match *spec {
        ConstraintSpec::Holder { gamma, .. } => {
            let path = chain.directed_path(cloud)?;
            if !strictly_increasing(&path) {
                f64::INFINITY
            } else {
                holder_norm_path(&path, gamma)?
            }
        }
        ConstraintSpec::Entropy { a, b, .. } => {
            let path = chain.directed_path(cloud)?;
            if !strictly_increasing(&path) {
                f64::INFINITY
            } else {
                entropy_path(&path, a, b)?
            }
        }
        ConstraintSpec::NonDirEntropy { a, b, t, .. } => nondir_entropy(t, &chain.planar_sequence(cloud)?, a, b)?,
        ConstraintSpec::NonDirHolder { gamma, t, .. } => nondir_holder(t, &chain.planar_sequence(cloud)?, gamma)?,
    };
    Ok(Compatibility {
        compatible: value <= spec.budget() + BUDGET_SLACK,
        value,
    })
}

fn strictly_increasing(path: &[DirectedPoint]) -> bool {
    path.windows(2).all(|w| w[1].t > w[0].t)
}
