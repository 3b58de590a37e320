use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{run_replicas, Moments, Problem, ReplicaPlan, ReplicaValue, Sampling, CODE_VERSION};
use crate::error::{Error, Result};

/// Bundled GUE Tracy–Widom CDF table.
pub const DEFAULT_TW_TABLE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/tw_gue_cdf.csv");

/// Fewer replicas give too noisy a variance for the fluctuation scale.
pub const MIN_FLUCT_REPLICAS: u32 = 500;

/// Tabulated CDF of the GUE Tracy–Widom law on an increasing grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TwTable {
    s: Vec<f64>,
    cdf: Vec<f64>,
}

#[derive(Deserialize)]
struct Row {
    s: f64,
    cdf: f64,
}

impl TwTable {
    /// Reads a `s,cdf` CSV; lines starting with `#` are comments.
    pub fn load(path: impl AsRef<Path>) -> Result<TwTable> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let (mut s, mut cdf) = (Vec::new(), Vec::new());
        for row in rdr.deserialize::<Row>() {
            let row = row?;
            s.push(row.s);
            cdf.push(row.cdf);
        }
        TwTable::new(s, cdf)
    }

    pub fn new(s: Vec<f64>, cdf: Vec<f64>) -> Result<TwTable> {
        if s.len() < 3 || s.len() != cdf.len() {
            return Err(Error::Format("Tracy-Widom table needs at least three aligned rows".into()));
        }
        if s.windows(2).any(|w| w[1] <= w[0]) || cdf.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Format("Tracy-Widom table must be increasing".into()));
        }
        Ok(TwTable { s, cdf })
    }

    /// Linear interpolation, clamped to 0 and 1 outside the grid.
    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.s.len();
        if x <= self.s[0] {
            return if x == self.s[0] { self.cdf[0] } else { 0.0 };
        }
        if x >= self.s[n - 1] {
            return 1.0;
        }
        let i = self.s.partition_point(|&v| v <= x) - 1;
        let u = (x - self.s[i]) / (self.s[i + 1] - self.s[i]);
        self.cdf[i] + u * (self.cdf[i + 1] - self.cdf[i])
    }

    /// Density of each grid cell, as `(midpoint, density)`.
    pub fn density(&self) -> Vec<(f64, f64)> {
        self.s
            .windows(2)
            .zip(self.cdf.windows(2))
            .map(|(s, f)| ((s[0] + s[1]) / 2.0, (f[1] - f[0]) / (s[1] - s[0])))
            .collect()
    }

    /// Mean, variance and skewness of the tabulated law.
    pub fn moments(&self) -> (f64, f64, f64) {
        let cells: Vec<(f64, f64)> = self
            .s
            .windows(2)
            .zip(self.cdf.windows(2))
            .map(|(s, f)| ((s[0] + s[1]) / 2.0, f[1] - f[0]))
            .collect();
        let mass: f64 = cells.iter().map(|c| c.1).sum();
        let mean = cells.iter().map(|(x, p)| x * p).sum::<f64>() / mass;
        let var = cells.iter().map(|(x, p)| (x - mean).powi(2) * p).sum::<f64>() / mass;
        let m3 = cells.iter().map(|(x, p)| (x - mean).powi(3) * p).sum::<f64>() / mass;
        (mean, var, m3 / var.powf(1.5))
    }
}

/// Equal-width histogram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub counts: Vec<u32>,
}

impl Histogram {
    pub fn build(values: &[f64], lo: f64, hi: f64, bins: usize) -> Histogram {
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0; bins];
        for &v in values {
            let i = ((v - lo) / width).floor();
            if i >= 0.0 && (i as usize) < bins {
                counts[i as usize] += 1;
            }
        }
        Histogram { lo, width, counts }
    }

    /// Normalised density per bin for `total` samples.
    pub fn densities(&self, total: usize) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / (total as f64 * self.width)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluctuationReport {
    pub version: String,
    pub plan: ReplicaPlan,
    pub table: PathBuf,
    pub values: Vec<ReplicaValue>,
    pub moments: Moments,
    /// Raw `mean L(t) / t`.
    pub mean_over_t: f64,
    /// Fluctuation scale `sqrt(Var L / Var TW) / t^{1/3}`.
    pub c_hat: f64,
    /// Centring constant matching the first moment of `C t + c t^{1/3} TW`.
    pub big_c_hat: f64,
    pub tw_mean: f64,
    pub tw_variance: f64,
    pub tw_skewness: f64,
    /// Sup distance between the standardised sample and the TW CDF.
    pub ks_distance: f64,
    pub histogram: Histogram,
}

impl FluctuationReport {
    /// `(L - C t) / (c t^{1/3})` for every replica.
    pub fn standardised(&self) -> Result<Vec<f64>> {
        let t = fluct_horizon(&self.plan)?;
        let scale = self.c_hat * t.cbrt();
        Ok(self.values.iter().map(|v| (v.value - self.big_c_hat * t) / scale).collect())
    }
}

fn fluct_horizon(plan: &ReplicaPlan) -> Result<f64> {
    match (plan.problem, plan.sampling) {
        (Problem::Lpp { point_to_point: true, .. }, Sampling::Poisson { t, .. }) => Ok(t),
        _ => Err(Error::Plan("fluctuations are studied on point-to-point Poisson strips".into())),
    }
}

/// Fits `L(t) ~ C t + c t^{1/3} TW` by matching mean and variance, then
/// compares the standardised sample with the table.
pub fn fluctuation_study(plan: &ReplicaPlan, table: &TwTable, table_path: impl AsRef<Path>) -> Result<FluctuationReport> {
    let t = fluct_horizon(plan)?;
    if plan.replicas < MIN_FLUCT_REPLICAS {
        return Err(Error::Plan(format!("fluctuation studies need at least {MIN_FLUCT_REPLICAS} replicas")));
    }
    let values = run_replicas(plan)?;
    let ls: Vec<f64> = values.iter().map(|v| v.value).collect();
    let moments = Moments::of(&ls)?;
    let (tw_mean, tw_variance, tw_skewness) = table.moments();
    if moments.variance <= 0.0 {
        return Err(Error::Degenerate("L(t) has zero sample variance".into()));
    }
    let c_hat = (moments.variance / tw_variance).sqrt() / t.cbrt();
    let big_c_hat = (moments.mean - c_hat * t.cbrt() * tw_mean) / t;
    let scale = c_hat * t.cbrt();
    let mut z: Vec<f64> = ls.iter().map(|l| (l - big_c_hat * t) / scale).collect();
    z.sort_by(f64::total_cmp);
    let n = z.len() as f64;
    let mut ks_distance: f64 = 0.0;
    for (i, &x) in z.iter().enumerate() {
        let f = table.cdf(x);
        ks_distance = ks_distance.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    let histogram = Histogram::build(&z, -6.0, 4.0, 40);
    Ok(FluctuationReport {
        version: CODE_VERSION.into(),
        plan: *plan,
        table: table_path.as_ref().to_path_buf(),
        values,
        moments,
        mean_over_t: moments.mean / t,
        c_hat,
        big_c_hat,
        tw_mean,
        tw_variance,
        tw_skewness,
        ks_distance,
        histogram,
    })
}
