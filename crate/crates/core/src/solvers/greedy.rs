use super::anneal::seg;
use super::nondir::SegmentBudget;
use super::{LppSolution, Method, Work};
use crate::analytics::lower_box_half_height;
use crate::constraints::{is_compatible, Chain, ConstraintSpec};
use crate::error::{Error, Result};
use crate::model::{Domain, PlanarPoint, PointCloud};

/// Constructive lower bound from the box partitions behind the lower-tail
/// estimates.
///
/// Directed specs: the horizon is cut into `4k` time slabs, each capped to a
/// band `|x| <= h`; one point from each non-empty even slab, up to `k` of
/// them, is compatible by the choice of `h`. Non-directed specs: squares of
/// side `pi r / sqrt(m)` are walked along a square spiral from the origin and
/// one point per non-empty square is appended while the path stays within
/// budget.
pub fn greedy_box_lower_bound(cloud: &PointCloud, spec: &ConstraintSpec, k: usize) -> Result<LppSolution> {
    spec.validate()?;
    if k == 0 || k > cloud.len() {
        return Err(Error::param(format!("k must lie in 1..={}, got {k}", cloud.len())));
    }
    let indices = if spec.is_directed() {
        directed_boxes(cloud, spec, k)?
    } else {
        spiral(cloud, spec, k)?
    };
    let chain = Chain::new(indices);
    let check = is_compatible(cloud, &chain, spec)?;
    debug_assert!(check.compatible);
    Ok(LppSolution {
        cardinality: chain.len(),
        chain,
        achieved: check.value,
        method: Method::Greedy,
        work: Work {
            evaluations: cloud.len() as u64,
            states: 0,
        },
    })
}

fn directed_boxes(cloud: &PointCloud, spec: &ConstraintSpec, k: usize) -> Result<Vec<usize>> {
    let pts = cloud.require_directed()?;
    let (t, x) = match *cloud.domain() {
        Domain::Box { t, halfwidth } => (t, halfwidth),
        Domain::Strip { t, window } => (t, window),
        _ => unreachable!("directed clouds live in a box or strip"),
    };
    let h = lower_box_half_height(spec, t, x, k)?;
    let slab = t / (4 * k) as f64;
    let mut taken = vec![false; 4 * k + 1];
    let mut out = Vec::with_capacity(k);
    for (i, p) in pts.iter().enumerate() {
        // slab i covers [(i - 1) slab, i slab)
        let s = (p.t / slab).floor() as usize + 1;
        if s % 2 == 1 || s > 4 * k || taken[s] || p.x.abs() > h {
            continue;
        }
        taken[s] = true;
        out.push(i);
        if out.len() == k {
            break;
        }
    }
    Ok(out)
}

/// Integer square centres of a clockwise square spiral starting at the origin.
fn spiral_cells(count: usize) -> Vec<(i64, i64)> {
    let mut cells = vec![(0, 0)];
    let (mut x, mut y) = (0i64, 0i64);
    let dirs = [(0, 1), (1, 0), (0, -1), (-1, 0)];
    let mut leg = 1;
    let mut d = 0;
    while cells.len() < count {
        for _ in 0..2 {
            for _ in 0..leg {
                x += dirs[d].0;
                y += dirs[d].1;
                cells.push((x, y));
            }
            d = (d + 1) % 4;
        }
        leg += 1;
    }
    cells.truncate(count);
    cells
}

fn spiral(cloud: &PointCloud, spec: &ConstraintSpec, k: usize) -> Result<Vec<usize>> {
    let pos = cloud.require_planar()?;
    let r = match *cloud.domain() {
        Domain::Disk { r } => r,
        _ => return Err(Error::Usage("the spiral construction needs a disk domain".into())),
    };
    let m = pos.len();
    let sb = SegmentBudget::from_spec(spec)?;
    let delta = std::f64::consts::PI * r / (m as f64).sqrt();
    // squares fully inside the disk, in spiral order
    let reach = (r / delta).ceil() as i64 + 1;
    let cells = spiral_cells(((2 * reach + 1) * (2 * reach + 1)) as usize);
    let inside = |c: &(i64, i64)| {
        let (cx, cy) = (c.0 as f64 * delta, c.1 as f64 * delta);
        (cx.abs() + delta / 2.0).hypot(cy.abs() + delta / 2.0) <= r
    };
    let order: Vec<(i64, i64)> = cells.into_iter().filter(inside).collect();
    let rank: std::collections::HashMap<(i64, i64), usize> =
        order.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut first: Vec<Option<usize>> = vec![None; order.len()];
    for (i, p) in pos.iter().enumerate() {
        let c = ((p.x / delta).round() as i64, (p.y / delta).round() as i64);
        if let Some(&slot) = rank.get(&c) {
            if first[slot].is_none() {
                first[slot] = Some(i);
            }
        }
    }
    let mut out = Vec::with_capacity(k);
    let mut last = PlanarPoint::ORIGIN;
    let mut sum = 0.0;
    for i in first.into_iter().flatten() {
        let s = sum + seg(&last, &pos[i], sb.power);
        if !sb.feasible(s) {
            break;
        }
        out.push(i);
        sum = s;
        last = pos[i];
        if out.len() == k {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spiral_cells_are_adjacent() {
        let cells = spiral_cells(50);
        assert_eq!(cells[0], (0, 0));
        for w in cells.windows(2) {
            assert_eq!((w[0].0 - w[1].0).abs() + (w[0].1 - w[1].1).abs(), 1);
        }
        let distinct: std::collections::HashSet<_> = cells.iter().collect();
        assert_eq!(distinct.len(), 50);
    }
}
