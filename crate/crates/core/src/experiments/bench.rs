use std::io::Write;
use std::time::Instant;

use crate::error::Result;
use crate::method::Reduction;
use crate::projection::SparseProjection;
use crate::seed::Seed;
use crate::synth::{smooth_random_field, SmoothFieldSpec};
use crate::volume::{build_lattice_topology, Connectivity, GridShape};

pub const SCHEMA: &str = "bench.v1: method,p,k,seconds";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Cube edge lengths.
    pub sizes: Vec<usize>,
    pub n: usize,
    /// `k = p / k_ratio`.
    pub k_ratio: usize,
    pub repeats: usize,
    pub fwhm: f64,
    pub methods: Vec<Reduction>,
    pub seed: Seed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: Reduction,
    pub p: usize,
    pub k: usize,
    /// Best wall-clock time over the repeats.
    pub seconds: f64,
}

/// Times every method on smooth noisy cubes of each size. Data generation
/// and topology construction are not timed; `rp` timings include drawing the
/// projection and projecting all samples.
pub fn bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for (si, &edge) in config.sizes.iter().enumerate() {
        let spec = SmoothFieldSpec {
            shape: GridShape::cube(edge)?,
            n: config.n,
            fwhm: config.fwhm,
            noise_sigma: 1.0,
            seed: config.seed.derive(si as u64),
        };
        let stack = smooth_random_field(&spec)?.combined;
        let topology = build_lattice_topology(stack.mask(), Connectivity::Faces);
        let p = stack.n_voxels();
        let k = (p / config.k_ratio.max(1)).max(1);
        for &method in &config.methods {
            let mut best = f64::INFINITY;
            for r in 0..config.repeats.max(1) {
                let seed = config.seed.derive(1000 + r as u64);
                let start = Instant::now();
                match method {
                    Reduction::Cluster(m) => {
                        std::hint::black_box(m.cluster(&stack, &topology, k, seed)?);
                    }
                    Reduction::RandomProjection => {
                        let proj = SparseProjection::new(p, k, seed)?;
                        for col in stack.data().columns() {
                            std::hint::black_box(proj.project(&col.to_vec())?);
                        }
                    }
                }
                best = best.min(start.elapsed().as_secs_f64());
            }
            rows.push(BenchRow {
                method,
                p,
                k,
                seconds: best,
            });
        }
    }
    Ok(rows)
}

/// Least-squares slope of `ln(seconds)` against `ln(p)`.
pub fn log_log_slope(points: &[(usize, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|&(p, _)| (p as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, t)| t.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn write_bench_csv<W: Write>(out: W, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "p", "k", "seconds"])?;
    for r in rows {
        w.write_record([
            r.method.to_string(),
            r.p.to_string(),
            r.k.to_string(),
            r.seconds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
