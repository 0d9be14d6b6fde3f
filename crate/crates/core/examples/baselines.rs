//! Every clusterer on the same data, compared by cluster-size spread.

use featagg::synth::{smooth_random_field, SmoothFieldSpec};
use featagg::{build_lattice_topology, Connectivity, GridShape, Method, Seed};

fn main() -> featagg::Result<()> {
    let spec = SmoothFieldSpec {
        shape: GridShape::cube(16)?,
        n: 20,
        fwhm: 6.0,
        noise_sigma: 1.0,
        seed: Seed(1),
    };
    let stack = smooth_random_field(&spec)?.combined;
    let topology = build_lattice_topology(stack.mask(), Connectivity::Faces);
    let k = stack.n_voxels() / 10;

    println!("{:<12} {:>8} {:>8} {:>10}", "method", "largest", "min", "singletons");
    for method in Method::ALL {
        let start = std::time::Instant::now();
        let labeling = method.cluster(&stack, &topology, k, Seed(1))?;
        let sizes = labeling.sizes();
        println!(
            "{:<12} {:>8} {:>8} {:>10}   ({:.0} ms)",
            method.name(),
            sizes.iter().max().unwrap(),
            sizes.iter().min().unwrap(),
            sizes.iter().filter(|&&s| s == 1).count(),
            start.elapsed().as_secs_f64() * 1e3
        );
    }
    Ok(())
}
