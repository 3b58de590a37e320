use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::{ExponentReport, Histogram, ReplicaValue, TwTable};
use crate::constraints::Chain;
use crate::error::{Error, Result};
use crate::model::{PointCloud, Points};

/// Writes `value` as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// One row per replica: `index,seed,points,value`.
pub fn write_values_csv(values: &[ReplicaValue], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    for v in values {
        w.serialize(v)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 40.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Frame {
        let (x1, y1) = (if x1 > x0 { x1 } else { x0 + 1.0 }, if y1 > y0 { y1 } else { y0 + 1.0 });
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{PAD}" y="24" font-family="sans-serif" font-size="14">{title}</text>"#);
    let _ = writeln!(
        out,
        r##"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="#888"/>"##,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
}

fn polyline(out: &mut String, pts: &[(f64, f64)], colour: &str) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#,
        coords.join(" ")
    );
}

/// Histogram of standardised values, optionally with the TW density overlaid.
pub fn svg_histogram(hist: &Histogram, total: usize, tw: Option<&TwTable>) -> String {
    let dens = hist.densities(total.max(1));
    let hi = hist.lo + hist.width * dens.len() as f64;
    let mut top = dens.iter().cloned().fold(0.0, f64::max);
    let overlay: Vec<(f64, f64)> = tw
        .map(|t| t.density().into_iter().filter(|(x, _)| *x >= hist.lo && *x <= hi).collect())
        .unwrap_or_default();
    top = overlay.iter().map(|p| p.1).fold(top, f64::max);
    let f = Frame::new(hist.lo, hi, 0.0, top * 1.05);
    let mut out = String::new();
    open(&mut out, "standardised L(t)");
    for (i, d) in dens.iter().enumerate() {
        let x = hist.lo + i as f64 * hist.width;
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="#3182bd"/>"##,
            f.px(x),
            f.py(*d),
            f.px(x + hist.width) - f.px(x),
            f.py(0.0) - f.py(*d)
        );
    }
    if !overlay.is_empty() {
        let pts: Vec<(f64, f64)> = overlay.iter().map(|(x, y)| (f.px(*x), f.py(*y))).collect();
        polyline(&mut out, &pts, "#d62728");
    }
    out.push_str("</svg>\n");
    out
}

/// Cloud points with the chain drawn through them.
pub fn svg_path_plot(cloud: &PointCloud, chain: &Chain) -> Result<String> {
    let (pts, path): (Vec<(f64, f64)>, Vec<(f64, f64)>) = match cloud.points() {
        Points::Directed(p) => (
            p.iter().map(|q| (q.t, q.x)).collect(),
            chain.directed_path(cloud)?.iter().map(|q| (q.t, q.x)).collect(),
        ),
        Points::Planar(p) => {
            let mut path = vec![(0.0, 0.0)];
            path.extend(chain.planar_sequence(cloud)?.iter().map(|q| (q.x, q.y)));
            (p.iter().map(|q| (q.x, q.y)).collect(), path)
        }
        Points::Weighted(p) => {
            let mut path = vec![(0.0, 0.0)];
            path.extend(chain.indices.iter().map(|&i| (p[i].x, p[i].y)));
            (p.iter().map(|q| (q.x, q.y)).collect(), path)
        }
    };
    let all = pts.iter().chain(path.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        (x0, x1, y0, y1) = (x0.min(x), x1.max(x), y0.min(y), y1.max(y));
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let f = Frame::new(x0, x1, y0, y1);
    let mut out = String::new();
    open(&mut out, &format!("{} points, chain of {}", pts.len(), chain.len()));
    for (x, y) in &pts {
        let _ = writeln!(out, r##"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="#555"/>"##, f.px(*x), f.py(*y));
    }
    let line: Vec<(f64, f64)> = path.iter().map(|(x, y)| (f.px(*x), f.py(*y))).collect();
    polyline(&mut out, &line, "#d62728");
    out.push_str("</svg>\n");
    Ok(out)
}

/// `log E[L_m]` against `log m` with the fitted line.
pub fn svg_exponent_plot(report: &ExponentReport) -> String {
    let lx: Vec<f64> = report.ms.iter().map(|&m| (m as f64).ln()).collect();
    let ly: Vec<f64> = report.means.iter().map(|v| v.ln()).collect();
    let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let f = Frame::new(min(&lx), max(&lx), min(&ly) - 0.1, max(&ly) + 0.1);
    let mut out = String::new();
    open(
        &mut out,
        &format!("slope {:.3}, predicted {:.3}", report.fit.slope, report.predicted),
    );
    for (x, y) in lx.iter().zip(&ly) {
        let _ = writeln!(out, r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="#3182bd"/>"##, f.px(*x), f.py(*y));
    }
    let fit = |x: f64| report.fit.intercept + report.fit.slope * x;
    let (a, b) = (min(&lx), max(&lx));
    polyline(&mut out, &[(f.px(a), f.py(fit(a))), (f.px(b), f.py(fit(b)))], "#d62728");
    out.push_str("</svg>\n");
    out
}
