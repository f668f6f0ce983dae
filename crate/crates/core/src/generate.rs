//! Reproducible random instances.
//!
//! All randomness comes from ChaCha8 seeded with the spec's 64-bit seed, so
//! a spec always yields a bit-identical instance on every platform. The
//! depot sits at the origin.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Layout {
    UniformDisk { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    /// Points scattered within `spread` of `clusters` random cluster centers
    /// drawn from the annulus `[radius/4, radius]`.
    Clustered { clusters: usize, radius: f64, spread: f64 },
    /// Every terminal at one point (a bin-packing-like instance).
    CoLocated { at: Point },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DemandLaw {
    Uniform { lo: f64, hi: f64 },
    Fixed(f64),
    /// With probability `p_big` a demand in `[epsilon, 1]`, otherwise in `(0, epsilon)`.
    MixedBigSmall { p_big: f64, epsilon: f64 },
}

impl FromStr for DemandLaw {
    type Err = Error;

    /// `uniform:LO:HI`, `fixed:D` or `mixed:P_BIG:EPS`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let f = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidParam(format!("invalid number '{t}' in law '{s}'")))
        };
        let law = match parts.as_slice() {
            ["uniform", lo, hi] => DemandLaw::Uniform { lo: f(lo)?, hi: f(hi)? },
            ["fixed", d] => DemandLaw::Fixed(f(d)?),
            ["mixed", p, e] => DemandLaw::MixedBigSmall {
                p_big: f(p)?,
                epsilon: f(e)?,
            },
            _ => return Err(Error::InvalidParam(format!("unknown demand law '{s}'"))),
        };
        law.validate()?;
        Ok(law)
    }
}

impl fmt::Display for DemandLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DemandLaw::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
            DemandLaw::Fixed(d) => write!(f, "fixed:{d}"),
            DemandLaw::MixedBigSmall { p_big, epsilon } => write!(f, "mixed:{p_big}:{epsilon}"),
        }
    }
}

impl DemandLaw {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            DemandLaw::Uniform { lo, hi } => lo > 0.0 && lo <= hi && hi <= 1.0,
            DemandLaw::Fixed(d) => d > 0.0 && d <= 1.0,
            DemandLaw::MixedBigSmall { p_big, epsilon } => {
                (0.0..=1.0).contains(&p_big) && epsilon > 0.0 && epsilon < 1.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParam(format!("invalid demand law {self:?}")))
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            DemandLaw::Uniform { lo, hi } => {
                if lo == hi {
                    lo
                } else {
                    rng.gen_range(lo..=hi)
                }
            }
            DemandLaw::Fixed(d) => d,
            DemandLaw::MixedBigSmall { p_big, epsilon } => {
                if rng.gen_bool(p_big) {
                    rng.gen_range(epsilon..=1.0)
                } else {
                    rng.gen_range(0.0..epsilon).max(epsilon * 1e-3)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub layout: Layout,
    pub n: usize,
    pub demand: DemandLaw,
    pub seed: u64,
}

impl Layout {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Layout::UniformDisk { radius } => radius > 0.0 && radius.is_finite(),
            Layout::Annulus { inner, outer } => inner > 0.0 && inner <= outer && outer.is_finite(),
            Layout::Clustered {
                clusters,
                radius,
                spread,
            } => clusters >= 1 && radius > 0.0 && spread >= 0.0 && spread < radius / 4.0,
            Layout::CoLocated { at } => at.is_finite() && at != Point::ORIGIN,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParam(format!("invalid layout {self:?}")))
        }
    }
}

fn uniform_in_disk(rng: &mut ChaCha8Rng, radius: f64) -> Point {
    Point::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU))
}

pub fn generate(spec: &GeneratorSpec) -> Result<Instance> {
    if spec.n == 0 {
        return Err(Error::InvalidParam("n must be at least 1".into()));
    }
    spec.layout.validate()?;
    spec.demand.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let cluster_centers: Vec<Point> = match spec.layout {
        Layout::Clustered {
            clusters, radius, ..
        } => (0..clusters)
            .map(|_| {
                let r = rng.gen_range(radius / 4.0..=radius);
                Point::from_polar(r, rng.gen_range(0.0..TAU))
            })
            .collect(),
        _ => Vec::new(),
    };

    let mut sites = Vec::with_capacity(spec.n);
    while sites.len() < spec.n {
        let p = match spec.layout {
            Layout::UniformDisk { radius } => uniform_in_disk(&mut rng, radius),
            Layout::Annulus { inner, outer } => {
                let u: f64 = rng.gen();
                let r = (inner * inner + u * (outer * outer - inner * inner)).sqrt();
                Point::from_polar(r.clamp(inner, outer), rng.gen_range(0.0..TAU))
            }
            Layout::Clustered { spread, .. } => {
                let c = cluster_centers[rng.gen_range(0..cluster_centers.len())];
                let off = uniform_in_disk(&mut rng, spread);
                Point::new(c.x + off.x, c.y + off.y)
            }
            Layout::CoLocated { at } => at,
        };
        // The depot must not host a terminal.
        if p.x.hypot(p.y) < 1e-9 {
            continue;
        }
        let d = spec.demand.sample(&mut rng);
        sites.push((p, d));
    }
    Instance::new(Point::ORIGIN, sites)
}
