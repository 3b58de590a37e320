use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ln_gamma, LogValue};
use crate::constraints::check_ab;
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

/// Largest dimension `k` accepted by [`mc_volume`].
pub const MC_DIMENSION_CAP: usize = 6;
/// Smallest sample count accepted by [`mc_volume`].
pub const MC_MIN_SAMPLES: u64 = 100_000;

const MC_CHUNK: u64 = 1 << 16;

/// Volume of the increment set of `k`-step paths in `[0, t]` with
/// `(a, b)`-entropy at most `budget`.
pub fn vol_entropy(k: usize, t: f64, budget: f64, a: f64, b: f64) -> Result<LogValue> {
    check_ab(a, b)?;
    require_non_negative("t", t)?;
    require_non_negative("B", budget)?;
    if k == 0 {
        return Ok(LogValue { ln: 0.0 });
    }
    let kf = k as f64;
    let c = (a + b) / a;
    let ln = kf * (2f64.ln() - a.ln() + ln_gamma(1.0 / a) + ln_gamma(c)) - ln_gamma(kf / a + 1.0)
        - ln_gamma(kf * c + 1.0)
        + kf / a * budget.ln()
        + kf * c * t.ln();
    Ok(LogValue { ln: nan_to_zero(ln) })
}

/// Volume of the increment set of `k`-step paths in `[0, t]` with local
/// Hölder norm at most `a_max`.
pub fn vol_holder(k: usize, t: f64, a_max: f64, gamma: f64) -> Result<LogValue> {
    require_non_negative("gamma", gamma)?;
    require_non_negative("t", t)?;
    require_non_negative("A", a_max)?;
    if k == 0 {
        return Ok(LogValue { ln: 0.0 });
    }
    let kf = k as f64;
    let g1 = 1.0 + gamma;
    let ln = kf * ((2.0 * a_max).ln() + ln_gamma(g1)) - ln_gamma(kf * g1 + 1.0) + kf * g1 * t.ln();
    Ok(LogValue { ln: nan_to_zero(ln) })
}

/// Volume of `{(y_1..y_k) in (R^2)^k : sum |y_i|^{1/g} <= d}` with
/// `g = (b + 1) / a`: planar sequences of non-directed entropy at most `B`
/// when `d = (B t^b)^{1/(b+1)}`.
pub fn vol_nondir(k: usize, d: f64, a: f64, b: f64) -> Result<LogValue> {
    check_ab(a, b)?;
    vol_planar(k, d, (b + 1.0) / a)
}

pub(crate) fn vol_planar(k: usize, d: f64, g: f64) -> Result<LogValue> {
    require_non_negative("D", d)?;
    if k == 0 {
        return Ok(LogValue { ln: 0.0 });
    }
    let kf = k as f64;
    let ln = kf * ((2.0 * std::f64::consts::PI * g).ln() + ln_gamma(2.0 * g)) - ln_gamma(2.0 * kf * g + 1.0)
        + 2.0 * kf * g * d.ln();
    Ok(LogValue { ln: nan_to_zero(ln) })
}

// 0 * ln 0 shows up as NaN when a zero size meets a zero exponent.
fn nan_to_zero(ln: f64) -> f64 {
    if ln.is_nan() {
        f64::NEG_INFINITY
    } else {
        ln
    }
}

/// Integration region for [`mc_volume`] and the induction checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Entropy { k: usize, t: f64, budget: f64, a: f64, b: f64 },
    Holder { k: usize, t: f64, a_max: f64, gamma: f64 },
    NonDir { k: usize, d: f64, a: f64, b: f64 },
}

impl Region {
    pub fn k(&self) -> usize {
        match *self {
            Region::Entropy { k, .. } | Region::Holder { k, .. } | Region::NonDir { k, .. } => k,
        }
    }

    /// Closed-form volume.
    pub fn exact(&self) -> Result<f64> {
        Ok(match *self {
            Region::Entropy { k, t, budget, a, b } => vol_entropy(k, t, budget, a, b)?,
            Region::Holder { k, t, a_max, gamma } => vol_holder(k, t, a_max, gamma)?,
            Region::NonDir { k, d, a, b } => vol_nondir(k, d, a, b)?,
        }
        .exp())
    }

    fn validate(&self) -> Result<()> {
        self.exact().map(|_| ())
    }
}

/// Hit-or-miss estimate with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
    pub samples: u64,
}

/// Hit-or-miss Monte Carlo volume of `region`.
///
/// Directed regions draw times uniformly on the ordered simplex (volume
/// `t^k / k!`) and each increment uniformly in `[-X, X]` with `X` the largest
/// admissible single increment. Planar regions draw each increment in the
/// square of side `2 d^g`. Work is split into fixed chunks with seeds
/// derived from `seed`, so the result does not depend on the thread count.
pub fn mc_volume(region: &Region, samples: u64, seed: u64) -> Result<McEstimate> {
    region.validate()?;
    let k = region.k();
    if k == 0 || k > MC_DIMENSION_CAP {
        return Err(Error::SizeCap {
            what: "mc_volume dimension",
            size: k,
            cap: MC_DIMENSION_CAP,
        });
    }
    if samples < MC_MIN_SAMPLES {
        return Err(Error::param(format!(
            "mc_volume needs at least {MC_MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let kf = k as f64;
    let box_volume = match *region {
        Region::Entropy { t, budget, a, b, .. } => {
            let half = (budget * t.powf(b)).powf(1.0 / a);
            t.powf(kf) / ln_gamma(kf + 1.0).exp() * (2.0 * half).powf(kf)
        }
        Region::Holder { t, a_max, gamma, .. } => {
            t.powf(kf) / ln_gamma(kf + 1.0).exp() * (2.0 * a_max * t.powf(gamma)).powf(kf)
        }
        Region::NonDir { d, a, b, .. } => (2.0 * d.powf((b + 1.0) / a)).powf(2.0 * kf),
    };
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let n = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut rng = rng_from_seed(derive_seed(seed, c));
            let mut buf = vec![0.0; k + 1];
            (0..n).filter(|_| hit(region, &mut rng, &mut buf)).count() as u64
        })
        .sum();
    let n = samples as f64;
    let p = hits as f64 / n;
    Ok(McEstimate {
        estimate: p * box_volume,
        stderr: (p * (1.0 - p) / n).sqrt() * box_volume,
        hits,
        samples,
    })
}

// Spacings of sorted uniforms on [0, t]: uniform on the ordered simplex.
fn simplex_spacings(rng: &mut crate::rng::Rng, t: f64, buf: &mut [f64]) {
    let k = buf.len() - 1;
    for v in buf.iter_mut().take(k) {
        *v = rng.random::<f64>() * t;
    }
    buf[..k].sort_by(f64::total_cmp);
    let mut prev = 0.0;
    for v in buf.iter_mut().take(k) {
        let cur = *v;
        *v = cur - prev;
        prev = cur;
    }
}

fn hit(region: &Region, rng: &mut crate::rng::Rng, buf: &mut [f64]) -> bool {
    let k = buf.len() - 1;
    match *region {
        Region::Entropy { t, budget, a, b, .. } => {
            simplex_spacings(rng, t, buf);
            let half = (budget * t.powf(b)).powf(1.0 / a);
            let mut used = 0.0;
            for &dt in &buf[..k] {
                let dx: f64 = (2.0 * rng.random::<f64>() - 1.0) * half;
                used += dx.abs().powf(a) / dt.powf(b);
            }
            used <= budget
        }
        Region::Holder { t, a_max, gamma, .. } => {
            simplex_spacings(rng, t, buf);
            let half = a_max * t.powf(gamma);
            buf[..k].iter().all(|&dt| {
                let dx: f64 = (2.0 * rng.random::<f64>() - 1.0) * half;
                dx.abs() <= a_max * dt.powf(gamma)
            })
        }
        Region::NonDir { d, a, b, .. } => {
            let g = (b + 1.0) / a;
            let half = d.powf(g);
            let mut used = 0.0;
            for _ in 0..k {
                let x: f64 = (2.0 * rng.random::<f64>() - 1.0) * half;
                let y: f64 = (2.0 * rng.random::<f64>() - 1.0) * half;
                used += x.hypot(y).powf(1.0 / g);
            }
            used <= d
        }
    }
}

fn quad<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, scale: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    quadrature::integrate(f, lo, hi, 1e-13 * scale.max(f64::MIN_POSITIVE)).integral
}

/// Right-hand side of the one-step recursion
/// `vol_k(t, B) = 2 int_0^t int_0^{(B u^b)^{1/a}} vol_{k-1}(t - u, B - y^a / u^b) dy du`,
/// evaluated by nested tanh-sinh quadrature over the closed form at `k - 1`.
pub fn induction_entropy(k: usize, t: f64, budget: f64, a: f64, b: f64) -> Result<f64> {
    require_positive("k", k as f64)?;
    let scale = vol_entropy(k, t, budget, a, b)?.exp();
    let prev = |tt: f64, bb: f64| vol_entropy(k - 1, tt.max(0.0), bb.max(0.0), a, b).map(|v| v.exp()).unwrap_or(0.0);
    let outer = |u: f64| {
        let ymax = (budget * u.powf(b)).powf(1.0 / a);
        quad(|y| prev(t - u, budget - y.powf(a) / u.powf(b)), 0.0, ymax, scale)
    };
    Ok(2.0 * quad(outer, 0.0, t, scale))
}

/// `vol_k(t) = int_0^t 2 A u^gamma vol_{k-1}(t - u) du`.
pub fn induction_holder(k: usize, t: f64, a_max: f64, gamma: f64) -> Result<f64> {
    require_positive("k", k as f64)?;
    let scale = vol_holder(k, t, a_max, gamma)?.exp();
    let prev = |tt: f64| vol_holder(k - 1, tt.max(0.0), a_max, gamma).map(|v| v.exp()).unwrap_or(0.0);
    Ok(quad(|u| 2.0 * a_max * u.powf(gamma) * prev(t - u), 0.0, t, scale))
}

/// `vol_k(D) = int_0^{D^g} 2 pi rho vol_{k-1}(D - rho^{1/g}) d rho`.
pub fn induction_nondir(k: usize, d: f64, a: f64, b: f64) -> Result<f64> {
    require_positive("k", k as f64)?;
    let scale = vol_nondir(k, d, a, b)?.exp();
    let g = (b + 1.0) / a;
    let prev = |dd: f64| vol_nondir(k - 1, dd.max(0.0), a, b).map(|v| v.exp()).unwrap_or(0.0);
    Ok(quad(
        |rho| 2.0 * std::f64::consts::PI * rho * prev(d - rho.powf(1.0 / g)),
        0.0,
        d.powf(g),
        scale,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn unit_cases() {
        assert!(rel(vol_entropy(1, 1.0, 1.0, 2.0, 1.0).unwrap().exp(), 4.0 / 3.0) < 1e-14);
        assert!(rel(vol_holder(1, 1.0, 1.0, 1.0).unwrap().exp(), 1.0) < 1e-14);
        assert!(rel(vol_nondir(1, 1.0, 2.0, 1.0).unwrap().exp(), std::f64::consts::PI) < 1e-14);
        for g in [0.0, 0.3, 2.5] {
            let v = vol_holder(1, 1.7, 0.8, g).unwrap().exp();
            assert!(rel(v, 2.0 * 0.8 * 1.7f64.powf(1.0 + g) / (1.0 + g)) < 1e-13);
        }
        // gamma = 0: (2A t)^k / k!
        assert!(rel(vol_holder(3, 2.0, 1.0, 0.0).unwrap().exp(), 64.0 / 6.0) < 1e-13);
        assert_eq!(vol_entropy(0, 5.0, 2.0, 2.0, 1.0).unwrap().ln, 0.0);
    }

    #[test]
    fn closed_form_scalings() {
        let (a, b) = (2.0, 1.0);
        for k in 1..6 {
            let base = vol_entropy(k, 1.3, 0.7, a, b).unwrap().ln;
            let s = vol_entropy(k, 2.0 * 1.3, 0.7, a, b).unwrap().ln;
            assert!((s - base - k as f64 * (a + b) / a * 2f64.ln()).abs() < 1e-12);
            let g = (b + 1.0) / a;
            let n0 = vol_nondir(k, 0.9, a, b).unwrap().ln;
            let n1 = vol_nondir(k, 3.0 * 0.9, a, b).unwrap().ln;
            assert!((n1 - n0 - 2.0 * k as f64 * g * 3f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_budget_region_is_null() {
        let r = Region::Entropy { k: 2, t: 1.0, budget: 0.0, a: 2.0, b: 1.0 };
        let e = mc_volume(&r, MC_MIN_SAMPLES, 1).unwrap();
        assert_eq!(e.estimate, 0.0);
        assert_eq!(r.exact().unwrap(), 0.0);
    }

    #[test]
    fn mc_guards() {
        let r = Region::Holder { k: 7, t: 1.0, a_max: 1.0, gamma: 1.0 };
        assert!(matches!(mc_volume(&r, MC_MIN_SAMPLES, 0), Err(Error::SizeCap { .. })));
        let r = Region::Holder { k: 2, t: 1.0, a_max: 1.0, gamma: 1.0 };
        assert!(mc_volume(&r, 10, 0).is_err());
    }

    #[test]
    fn mc_matches_k1_entropy() {
        let r = Region::Entropy { k: 1, t: 1.0, budget: 1.0, a: 2.0, b: 1.0 };
        let e = mc_volume(&r, 400_000, 3).unwrap();
        assert!((e.estimate - 4.0 / 3.0).abs() < 3.0 * e.stderr);
    }

    #[test]
    fn mc_is_thread_count_independent() {
        let r = Region::NonDir { k: 2, d: 1.0, a: 2.0, b: 1.0 };
        let a = mc_volume(&r, 200_000, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| mc_volume(&r, 200_000, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn induction_small() {
        assert!(rel(induction_entropy(1, 1.0, 1.0, 2.0, 1.0).unwrap(), 4.0 / 3.0) < 1e-9);
        assert!(rel(induction_holder(2, 1.5, 1.0, 0.5).unwrap(), vol_holder(2, 1.5, 1.0, 0.5).unwrap().exp()) < 1e-9);
        assert!(rel(induction_nondir(2, 1.0, 2.0, 1.0).unwrap(), vol_nondir(2, 1.0, 2.0, 1.0).unwrap().exp()) < 1e-9);
    }
}
