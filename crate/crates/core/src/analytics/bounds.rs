use serde::{Deserialize, Serialize};

use super::volume::vol_planar;
use super::{ln_gamma, vol_entropy, vol_holder, vol_nondir, LogValue};
use crate::constraints::ConstraintSpec;
use crate::error::{require_positive, Error, Result};

/// A probability bound: the raw log-value and its clamp into `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub ln: f64,
    pub value: f64,
    pub clamped: bool,
}

impl BoundValue {
    fn from_ln(ln: f64) -> Self {
        if ln >= 0.0 {
            BoundValue { ln, value: 1.0, clamped: true }
        } else {
            BoundValue { ln, value: ln.exp(), clamped: false }
        }
    }

    pub fn log_value(&self) -> LogValue {
        LogValue { ln: self.ln }
    }
}

fn ln_falling(m: u64, k: usize) -> f64 {
    ln_gamma(m as f64 + 1.0) - ln_gamma((m - k as u64) as f64 + 1.0)
}

fn ln_binom(n: usize, r: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(r as f64 + 1.0) - ln_gamma((n - r) as f64 + 1.0)
}

fn check_km(k: usize, m: u64) -> Result<()> {
    if k == 0 || k as u64 > m {
        return Err(Error::param(format!("k must lie in 1..={m}, got {k}")));
    }
    Ok(())
}

/// `E[N_k]` for `m` uniform points, clamped into a probability: a rigorous
/// upper bound for `P(L >= k)`.
///
/// Directed specs use the box `[0, t] x [-x, x]`, so
/// `E[N_k] = m!/(m-k)! Vol_k / (2 t x)^k`. The volume drops the `|x| <= x`
/// constraint and only over-counts. Non-directed specs use the disk of
/// radius `x` and count ordered `k`-sequences; their horizon is the one
/// stored in the spec and `t` is ignored.
pub fn first_moment_bound(k: usize, m: u64, t: f64, x: f64, spec: &ConstraintSpec) -> Result<BoundValue> {
    spec.validate()?;
    check_km(k, m)?;
    require_positive("t", t)?;
    require_positive("x", x)?;
    let kf = k as f64;
    let (vol, ln_area) = match *spec {
        ConstraintSpec::Holder { gamma, a_max } => (vol_holder(k, t, a_max, gamma)?, (2.0 * t * x).ln()),
        ConstraintSpec::Entropy { a, b, budget } => (vol_entropy(k, t, budget, a, b)?, (2.0 * t * x).ln()),
        ConstraintSpec::NonDirEntropy { a, b, budget, t: horizon } => {
            let d = (budget * horizon.powf(b)).powf(1.0 / (b + 1.0));
            (vol_nondir(k, d, a, b)?, (std::f64::consts::PI * x * x).ln())
        }
        ConstraintSpec::NonDirHolder { gamma, a_max, t: horizon } => {
            let d = a_max.powf(1.0 / gamma) * horizon;
            (vol_planar(k, d, gamma)?, (std::f64::consts::PI * x * x).ln())
        }
    };
    Ok(BoundValue::from_ln(ln_falling(m, k) + vol.ln - kf * ln_area))
}

/// Half-height `h` of the bands used by the directed box construction with
/// `k` points: any choice of one point per even slab of width `t / (4k)`
/// inside `|x| <= h` is compatible.
pub fn lower_box_half_height(spec: &ConstraintSpec, t: f64, x: f64, k: usize) -> Result<f64> {
    spec.validate()?;
    require_positive("t", t)?;
    require_positive("x", x)?;
    require_positive("k", k as f64)?;
    let kf = k as f64;
    let h = match *spec {
        ConstraintSpec::Holder { gamma, a_max } => a_max * (t / (4.0 * kf)).powf(gamma) / 2.0,
        ConstraintSpec::Entropy { a, b, budget } => {
            budget.powf(1.0 / a) * (t / 4.0).powf(b / a) / (2.0 * kf.powf((b + 1.0) / a))
        }
        _ => return Err(Error::param("the box construction is directed only")),
    };
    Ok(h.min(x))
}

/// Rigorous upper bound for `P(L <= k)` with `m` uniform points in
/// `[0, t] x [-x, x]`.
///
/// With `k' = k + 1` and `4k'` slabs, `L <= k` forces at least `k' + 1` of
/// the `2k'` even slabs to miss their band, which a union bound turns into
/// `C(2k', k'+1) (1 - h/(4x))^m`.
pub fn lower_tail_bound(k: usize, m: u64, t: f64, x: f64, spec: &ConstraintSpec) -> Result<BoundValue> {
    if !spec.is_directed() {
        return Err(Error::param("no explicit lower-tail bound for non-directed constraints"));
    }
    check_km(k, m)?;
    let kp = k + 1;
    let h = lower_box_half_height(spec, t, x, kp)?;
    let p = h / (4.0 * x);
    let ln = ln_binom(2 * kp, kp + 1) + m as f64 * (-p).ln_1p();
    Ok(BoundValue::from_ln(ln))
}

/// Both bounds over a grid of `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub spec: ConstraintSpec,
    pub m: u64,
    pub t: f64,
    pub x: f64,
    pub ks: Vec<usize>,
    pub upper: Vec<BoundValue>,
    pub lower: Vec<Option<BoundValue>>,
}

pub fn bound_report(spec: &ConstraintSpec, m: u64, t: f64, x: f64, ks: &[usize]) -> Result<BoundReport> {
    let mut upper = Vec::with_capacity(ks.len());
    let mut lower = Vec::with_capacity(ks.len());
    for &k in ks {
        upper.push(first_moment_bound(k, m, t, x, spec)?);
        lower.push(if spec.is_directed() {
            Some(lower_tail_bound(k, m, t, x, spec)?)
        } else {
            None
        });
    }
    Ok(BoundReport {
        spec: *spec,
        m,
        t,
        x,
        ks: ks.to_vec(),
        upper,
        lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ENT: ConstraintSpec = ConstraintSpec::Entropy { a: 2.0, b: 1.0, budget: 1.0 };

    #[test]
    fn first_moment_direct_small() {
        // m = 3, k = 1: 3 * (4/3) / 2
        let v = first_moment_bound(1, 3, 1.0, 1.0, &ENT).unwrap();
        assert!(v.clamped && (v.ln.exp() - 2.0).abs() < 1e-13);
        // m = 5, k = 2: 20 * vol_2 / 4
        let v2 = vol_entropy(2, 1.0, 1.0, 2.0, 1.0).unwrap().exp();
        let b = first_moment_bound(2, 5, 1.0, 1.0, &ENT).unwrap();
        assert!((b.ln.exp() - 5.0 * v2).abs() < 1e-12);
    }

    #[test]
    fn first_moment_decreases_past_mode() {
        let vals: Vec<f64> = (1..=120).map(|k| first_moment_bound(k, 200, 1.0, 1.0, &ENT).unwrap().ln).collect();
        let mode = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert!(vals[mode..].windows(2).all(|w| w[1] < w[0]));
        assert!(first_moment_bound(201, 200, 1.0, 1.0, &ENT).is_err());
        assert!(first_moment_bound(0, 200, 1.0, 1.0, &ENT).is_err());
    }

    #[test]
    fn lower_tail_decays_in_m_and_clamps() {
        let h = ConstraintSpec::Holder { gamma: 1.0, a_max: 1.0 };
        let a = lower_tail_bound(3, 1_000, 1.0, 1.0, &h).unwrap();
        let b = lower_tail_bound(3, 100_000, 1.0, 1.0, &h).unwrap();
        assert!(b.value < a.value && b.value < 1e-10);
        let c = lower_tail_bound(20, 20, 1.0, 1.0, &h).unwrap();
        assert!(c.clamped && c.value == 1.0);
    }

    #[test]
    fn band_heights() {
        let h = lower_box_half_height(&ENT, 1.0, 1.0, 1).unwrap();
        // k (2h)^a (4k/t)^b == B
        assert!(((2.0 * h).powi(2) * 4.0 - 1.0).abs() < 1e-14);
        let hk = lower_box_half_height(&ENT, 1.0, 1.0, 5).unwrap();
        assert!((5.0 * (2.0 * hk).powi(2) * 20.0 - 1.0).abs() < 1e-13);
        let g = ConstraintSpec::Holder { gamma: 0.0, a_max: 3.0 };
        assert_eq!(lower_box_half_height(&g, 1.0, 1.0, 4).unwrap(), 1.0);
    }

    #[test]
    fn nondir_first_moment_and_report() {
        let s = ConstraintSpec::NonDirEntropy { a: 2.0, b: 1.0, budget: 1.0, t: 1.0 };
        // k = 1: m * pi / (pi r^2)
        let v = first_moment_bound(1, 4, 1.0, 2.0, &s).unwrap();
        assert!((v.ln.exp() - 1.0).abs() < 1e-13);
        let r = bound_report(&s, 50, 1.0, 2.0, &[1, 2, 3]).unwrap();
        assert!(r.lower.iter().all(Option::is_none));
        assert!(r.upper.iter().all(|b| (0.0..=1.0).contains(&b.value)));
    }
}
