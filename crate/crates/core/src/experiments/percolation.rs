use std::io::Write;

use crate::error::Result;
use crate::labeling::Labeling;
use crate::method::Method;
use crate::seed::Seed;
use crate::volume::{ImageStack, Topology};

pub const SCHEMA: &str = "percolation.v1: method,k,repeats,bin_lo,bin_hi,count,largest_fraction,singleton_count,max_median_ratio";

/// Cluster sizes in `[lo, hi]` (inclusive); bins are powers of two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeBin {
    pub lo: usize,
    pub hi: usize,
    /// Clusters in the bin, averaged over repeats.
    pub count: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PercolationReport {
    pub method: Method,
    pub k: usize,
    pub repeats: usize,
    pub histogram: Vec<SizeBin>,
    /// Largest cluster size over `p`.
    pub largest_fraction: f64,
    pub singleton_count: f64,
    pub max_median_ratio: f64,
}

struct SizeStats {
    bins: Vec<usize>,
    largest_fraction: f64,
    singletons: usize,
    max_median: f64,
}

fn size_stats(labeling: &Labeling) -> SizeStats {
    let mut sizes = labeling.sizes();
    sizes.sort_unstable();
    let max = *sizes.last().expect("non-empty labeling");
    let n = sizes.len();
    let median = if n % 2 == 1 {
        sizes[n / 2] as f64
    } else {
        (sizes[n / 2 - 1] + sizes[n / 2]) as f64 / 2.0
    };
    let mut bins = vec![0; bin_of(max) + 1];
    for &s in &sizes {
        bins[bin_of(s)] += 1;
    }
    SizeStats {
        bins,
        largest_fraction: max as f64 / labeling.len() as f64,
        singletons: sizes.iter().take_while(|&&s| s == 1).count(),
        max_median: max as f64 / median,
    }
}

fn bin_of(size: usize) -> usize {
    (usize::BITS - 1 - size.leading_zeros()) as usize
}

/// Cluster-size statistics for each method, averaged over `repeats` seeds
/// derived from `seed`. A failing method yields its error and the others
/// still run.
pub fn percolation(
    stack: &ImageStack,
    topology: &Topology,
    methods: &[Method],
    k: usize,
    seed: Seed,
    repeats: usize,
) -> Vec<Result<PercolationReport>> {
    let repeats = repeats.max(1);
    methods
        .iter()
        .map(|&method| {
            let mut bins: Vec<f64> = Vec::new();
            let (mut largest, mut singletons, mut ratio) = (0.0, 0.0, 0.0);
            for r in 0..repeats {
                let labeling = method.cluster(stack, topology, k, seed.derive(r as u64))?;
                let stats = size_stats(&labeling);
                if bins.len() < stats.bins.len() {
                    bins.resize(stats.bins.len(), 0.0);
                }
                for (b, &c) in stats.bins.iter().enumerate() {
                    bins[b] += c as f64;
                }
                largest += stats.largest_fraction;
                singletons += stats.singletons as f64;
                ratio += stats.max_median;
            }
            let rf = repeats as f64;
            Ok(PercolationReport {
                method,
                k,
                repeats,
                histogram: bins
                    .iter()
                    .enumerate()
                    .map(|(b, &c)| SizeBin {
                        lo: 1 << b,
                        hi: (1 << (b + 1)) - 1,
                        count: c / rf,
                    })
                    .collect(),
                largest_fraction: largest / rf,
                singleton_count: singletons / rf,
                max_median_ratio: ratio / rf,
            })
        })
        .collect()
}

/// One row per (method, size bin).
pub fn write_percolation_csv<W: Write>(out: W, reports: &[PercolationReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "k",
        "repeats",
        "bin_lo",
        "bin_hi",
        "count",
        "largest_fraction",
        "singleton_count",
        "max_median_ratio",
    ])?;
    for r in reports {
        for bin in &r.histogram {
            w.write_record([
                r.method.to_string(),
                r.k.to_string(),
                r.repeats.to_string(),
                bin.lo.to_string(),
                bin.hi.to_string(),
                bin.count.to_string(),
                r.largest_fraction.to_string(),
                r.singleton_count.to_string(),
                r.max_median_ratio.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
