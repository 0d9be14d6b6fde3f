use std::fmt;
use std::str::FromStr;

use crate::baseline::{agglomerative, rand_single_linkage, LinkageKind};
use crate::error::Result;
use crate::fast::fast_cluster;
use crate::labeling::Labeling;
use crate::seed::Seed;
use crate::volume::{ImageStack, Topology};

/// Every clusterer exposed by the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Fast,
    RandSingle,
    Linkage(LinkageKind),
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Fast,
        Method::RandSingle,
        Method::Linkage(LinkageKind::Single),
        Method::Linkage(LinkageKind::Average),
        Method::Linkage(LinkageKind::Complete),
        Method::Linkage(LinkageKind::Ward),
    ];

    pub const WARD: Method = Method::Linkage(LinkageKind::Ward);
    pub const SINGLE: Method = Method::Linkage(LinkageKind::Single);

    pub fn name(self) -> &'static str {
        match self {
            Method::Fast => "fast",
            Method::RandSingle => "rand-single",
            Method::Linkage(kind) => kind.name(),
        }
    }

    /// Runs the clusterer. `seed` only matters for `rand-single`.
    pub fn cluster(self, stack: &ImageStack, topology: &Topology, k: usize, seed: Seed) -> Result<Labeling> {
        match self {
            Method::Fast => fast_cluster(stack, topology, k).map(|r| r.labeling),
            Method::RandSingle => rand_single_linkage(stack, topology, k, seed),
            Method::Linkage(kind) => agglomerative(stack, topology, k, kind),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
                format!("unknown method '{s}' (expected one of {})", names.join(", "))
            })
    }
}

/// A dimension reduction evaluated by the experiments: a clusterer (used
/// through a [`CompressionModel`](crate::compression::CompressionModel)) or a
/// sparse random projection (`rp`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reduction {
    Cluster(Method),
    RandomProjection,
}

impl Reduction {
    pub fn name(self) -> &'static str {
        match self {
            Reduction::Cluster(m) => m.name(),
            Reduction::RandomProjection => "rp",
        }
    }
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Reduction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "rp" {
            return Ok(Reduction::RandomProjection);
        }
        s.parse().map(Reduction::Cluster)
    }
}

/// A cluster count given either absolutely (`800`) or relative to the voxel
/// count (`p/10`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KSpec {
    Absolute(usize),
    FractionOfP(usize),
}

impl KSpec {
    /// Resolves against `p`, never returning less than 1.
    pub fn resolve(self, p: usize) -> usize {
        match self {
            KSpec::Absolute(k) => k,
            KSpec::FractionOfP(d) => (p / d).max(1),
        }
    }
}

impl FromStr for KSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(d) = s.strip_prefix("p/") {
            let d: usize = d.parse().map_err(|_| format!("bad divisor in '{s}'"))?;
            if d == 0 {
                return Err("divisor must be positive".into());
            }
            return Ok(KSpec::FractionOfP(d));
        }
        if s == "p" {
            return Ok(KSpec::FractionOfP(1));
        }
        s.parse()
            .map(KSpec::Absolute)
            .map_err(|_| format!("expected an integer, 'p' or 'p/<d>', got '{s}'"))
    }
}

impl fmt::Display for KSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KSpec::Absolute(k) => write!(f, "{k}"),
            KSpec::FractionOfP(1) => f.write_str("p"),
            KSpec::FractionOfP(d) => write!(f, "p/{d}"),
        }
    }
}
