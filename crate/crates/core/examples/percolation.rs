//! Cluster size histograms: single linkage percolates, fast clustering does not.

use featagg::experiments::percolation;
use featagg::synth::{smooth_random_field, SmoothFieldSpec};
use featagg::{build_lattice_topology, Connectivity, GridShape, Method, Seed};

fn main() -> featagg::Result<()> {
    let spec = SmoothFieldSpec {
        shape: GridShape::cube(20)?,
        n: 50,
        fwhm: 8.0,
        noise_sigma: 1.0,
        seed: Seed(2),
    };
    let stack = smooth_random_field(&spec)?.combined;
    let topology = build_lattice_topology(stack.mask(), Connectivity::Faces);
    let k = stack.n_voxels() / 10;
    let methods = [Method::Fast, Method::SINGLE, Method::WARD, Method::RandSingle];
    for report in percolation(&stack, &topology, &methods, k, Seed(2), 3) {
        let r = report?;
        let bins: Vec<String> = r
            .histogram
            .iter()
            .filter(|b| b.count > 0.0)
            .map(|b| format!("{}-{}:{}", b.lo, b.hi, b.count))
            .collect();
        println!(
            "{:<12} largest {:.3}  singletons {:>5}  [{}]",
            r.method.name(),
            r.largest_fraction,
            r.singleton_count,
            bins.join(" ")
        );
    }
    Ok(())
}
