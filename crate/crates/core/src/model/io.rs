//! Cloud files.
//!
//! Binary layout, all integers and floats little-endian:
//!
//! ```text
//! magic        4 bytes  "CLPP"
//! version      u16
//! model tag    u8       0 uniform, 1 poisson, 2 heavy-tail, 3 explicit
//! domain tag   u8       0 box, 1 strip, 2 disk, 3 weighted window
//! seed         u64
//! count        u64
//! point kind   u8       0 directed (t, x), 1 planar (x, y), 2 weighted (w, x, y)
//! model param  f64      m, lambda, alpha, or 0
//! domain p0    f64      t | t | r | radius
//! domain p1    f64      halfwidth | window | 0 | wmin
//! scaled       u8       0 or 1, followed by time and space factors (f64 each)
//! body         count x (2 | 3) f64
//! ```
//!
//! A file whose name ends in `.json` is read and written as the JSON debug form
//! instead. Both forms round-trip bit-exactly.

use std::fs;
use std::path::Path;

use super::{DirectedPoint, Domain, Model, PlanarPoint, PointCloud, Points, Transform, WeightedPoint};
use crate::error::{Error, Result};

pub const CLOUD_MAGIC: &[u8; 4] = b"CLPP";
pub const CLOUD_FORMAT_VERSION: u16 = 1;

impl PointCloud {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64 + self.len() * 24);
        out.extend_from_slice(CLOUD_MAGIC);
        out.extend_from_slice(&CLOUD_FORMAT_VERSION.to_le_bytes());
        let (model_tag, model_param) = match self.model {
            Model::Uniform { m } => (0u8, m as f64),
            Model::Poisson { lambda } => (1, lambda),
            Model::HeavyTail { alpha } => (2, alpha),
            Model::Explicit => (3, 0.0),
        };
        let (domain_tag, p0, p1) = match self.domain {
            Domain::Box { t, halfwidth } => (0u8, t, halfwidth),
            Domain::Strip { t, window } => (1, t, window),
            Domain::Disk { r } => (2, r, 0.0),
            Domain::WeightedWindow { radius, wmin } => (3, radius, wmin),
        };
        out.push(model_tag);
        out.push(domain_tag);
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&(self.len() as u64).to_le_bytes());
        let kind = match self.points {
            Points::Directed(_) => 0u8,
            Points::Planar(_) => 1,
            Points::Weighted(_) => 2,
        };
        out.push(kind);
        for v in [model_param, p0, p1] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        match self.transform {
            Some(tr) => {
                out.push(1);
                out.extend_from_slice(&tr.time_factor.to_le_bytes());
                out.extend_from_slice(&tr.space_factor.to_le_bytes());
            }
            None => out.push(0),
        }
        let mut put = |v: f64| out.extend_from_slice(&v.to_le_bytes());
        match &self.points {
            Points::Directed(p) => p.iter().for_each(|p| {
                put(p.t);
                put(p.x);
            }),
            Points::Planar(p) => p.iter().for_each(|p| {
                put(p.x);
                put(p.y);
            }),
            Points::Weighted(p) => p.iter().for_each(|p| {
                put(p.w);
                put(p.x);
                put(p.y);
            }),
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<PointCloud> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != CLOUD_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = u16::from_le_bytes(r.array()?);
        if version != CLOUD_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let model_tag = r.u8()?;
        let domain_tag = r.u8()?;
        let seed = u64::from_le_bytes(r.array()?);
        let count = u64::from_le_bytes(r.array()?) as usize;
        let kind = r.u8()?;
        let model_param = r.f64()?;
        let p0 = r.f64()?;
        let p1 = r.f64()?;
        let transform = match r.u8()? {
            0 => None,
            1 => Some(Transform {
                time_factor: r.f64()?,
                space_factor: r.f64()?,
            }),
            other => return Err(Error::Format(format!("bad scaled flag {other}"))),
        };
        let model = match model_tag {
            0 => Model::Uniform { m: model_param as u64 },
            1 => Model::Poisson { lambda: model_param },
            2 => Model::HeavyTail { alpha: model_param },
            3 => Model::Explicit,
            other => return Err(Error::Format(format!("bad model tag {other}"))),
        };
        let domain = match domain_tag {
            0 => Domain::Box { t: p0, halfwidth: p1 },
            1 => Domain::Strip { t: p0, window: p1 },
            2 => Domain::Disk { r: p0 },
            3 => Domain::WeightedWindow { radius: p0, wmin: p1 },
            other => return Err(Error::Format(format!("bad domain tag {other}"))),
        };
        let width = if kind == 2 { 3 } else { 2 };
        let expected = count
            .checked_mul(width * 8)
            .ok_or_else(|| Error::Format("count overflows".into()))?;
        if r.remaining() != expected {
            return Err(Error::Format(format!(
                "body holds {} bytes, header promises {expected}",
                r.remaining()
            )));
        }
        let points = match kind {
            0 => Points::Directed(
                (0..count)
                    .map(|_| Ok(DirectedPoint::new(r.f64()?, r.f64()?)))
                    .collect::<Result<_>>()?,
            ),
            1 => Points::Planar(
                (0..count)
                    .map(|_| Ok(PlanarPoint::new(r.f64()?, r.f64()?)))
                    .collect::<Result<_>>()?,
            ),
            2 => Points::Weighted(
                (0..count)
                    .map(|_| {
                        Ok(WeightedPoint {
                            w: r.f64()?,
                            x: r.f64()?,
                            y: r.f64()?,
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
            other => return Err(Error::Format(format!("bad point kind {other}"))),
        };
        Ok(PointCloud::from_parts(domain, model, seed, transform, points))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<PointCloud> {
        let c: PointCloud = serde_json::from_str(s)?;
        Ok(PointCloud::from_parts(c.domain, c.model, c.seed, c.transform, c.points))
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Format("truncated file".into()));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut a = [0u8; N];
        a.copy_from_slice(self.take(N)?);
        Ok(a)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

pub fn write_cloud(cloud: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = if is_json(path) {
        cloud.to_json()?.into_bytes()
    } else {
        cloud.to_bytes()
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_cloud(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if is_json(path) {
        let s = String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))?;
        PointCloud::from_json(&s)
    } else {
        PointCloud::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_heavy_tail_field, sample_poisson_strip, sample_uniform_disk, scale_holder};

    #[test]
    fn header_layout() {
        let c = sample_poisson_strip(1.0, 5.0, 2.0, 77).unwrap();
        let b = c.to_bytes();
        assert_eq!(&b[..4], b"CLPP");
        assert_eq!(u16::from_le_bytes([b[4], b[5]]), 1);
        assert_eq!(b[6], 1);
        assert_eq!(b[7], 1);
        assert_eq!(u64::from_le_bytes(b[8..16].try_into().unwrap()), 77);
        assert_eq!(u64::from_le_bytes(b[16..24].try_into().unwrap()), c.len() as u64);
    }

    #[test]
    fn every_kind_round_trips() {
        let clouds = [
            sample_poisson_strip(2.0, 3.0, 1.0, 1).unwrap(),
            scale_holder(&sample_poisson_strip(2.0, 3.0, 1.0, 1).unwrap(), 2.0, 0.5).unwrap(),
            sample_uniform_disk(40, 1.0, 2).unwrap(),
            sample_heavy_tail_field(1.5, 2.0, 0.5, 3).unwrap(),
        ];
        for c in clouds {
            assert_eq!(PointCloud::from_bytes(&c.to_bytes()).unwrap(), c);
            assert_eq!(PointCloud::from_json(&c.to_json().unwrap()).unwrap(), c);
        }
    }

    #[test]
    fn truncated_body_is_rejected() {
        let c = sample_uniform_disk(10, 1.0, 2).unwrap();
        let b = c.to_bytes();
        assert!(matches!(PointCloud::from_bytes(&b[..b.len() - 3]), Err(Error::Format(_))));
        assert!(matches!(PointCloud::from_bytes(b"XXXX"), Err(Error::Format(_))));
    }
}
