//! Fast clustering of a smooth noisy volume into exactly k connected clusters.

use featagg::synth::{smooth_random_field, SmoothFieldSpec};
use featagg::{build_lattice_topology, clusters_are_connected, fast_cluster, Connectivity, GridShape, Seed};

fn main() -> featagg::Result<()> {
    let spec = SmoothFieldSpec {
        shape: GridShape::cube(30)?,
        n: 20,
        fwhm: 6.0,
        noise_sigma: 1.0,
        seed: Seed(7),
    };
    let stack = smooth_random_field(&spec)?.combined;
    let topology = build_lattice_topology(stack.mask(), Connectivity::Faces);
    let k = stack.n_voxels() / 10;

    let start = std::time::Instant::now();
    let result = fast_cluster(&stack, &topology, k)?;
    let elapsed = start.elapsed();

    let sizes = result.labeling.sizes();
    println!("p = {}, k = {k}", stack.n_voxels());
    println!("cluster counts per iteration: {:?}", result.per_iteration_counts);
    println!(
        "sizes: min {}, max {}, connected: {}",
        sizes.iter().min().unwrap(),
        sizes.iter().max().unwrap(),
        clusters_are_connected(&topology, &result.labeling)
    );
    println!("took {:.1} ms", elapsed.as_secs_f64() * 1e3);
    Ok(())
}
