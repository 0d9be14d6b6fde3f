//! Stability of distance ratios on held-out samples.

use featagg::experiments::{isometry, IsometryConfig};
use featagg::synth::{smooth_random_field, SmoothFieldSpec};
use featagg::{build_lattice_topology, Connectivity, GridShape, Method, Reduction, Seed};

fn main() -> featagg::Result<()> {
    let spec = SmoothFieldSpec {
        shape: GridShape::cube(20)?,
        n: 50,
        fwhm: 8.0,
        noise_sigma: 1.0,
        seed: Seed(4),
    };
    let stack = smooth_random_field(&spec)?.combined;
    let topology = build_lattice_topology(stack.mask(), Connectivity::Faces);
    let config = IsometryConfig {
        methods: vec![
            Reduction::Cluster(Method::WARD),
            Reduction::Cluster(Method::Fast),
            Reduction::RandomProjection,
        ],
        k_grid: vec![400, 800, 1600],
        pairs: 1000,
        train_frac: 0.5,
        seed: Seed(4),
    };
    for r in isometry(&stack, &topology, &config)? {
        let s = r.summary().expect("pairs sampled");
        println!(
            "{:<5} k = {:>4}: mean {:.3}  std {:.4}  iqr {:.4}",
            r.method.name(),
            r.k,
            s.mean,
            s.std,
            s.iqr()
        );
    }
    Ok(())
}
