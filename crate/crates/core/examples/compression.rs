//! Reducing images to cluster values and expanding them back.

use featagg::synth::{smooth_random_field, SmoothFieldSpec};
use featagg::{
    build_lattice_topology, fast_cluster, isometry_ratio, CompressionModel, Connectivity, GridShape, ScalingMode,
    Seed,
};

fn main() -> featagg::Result<()> {
    let spec = SmoothFieldSpec {
        shape: GridShape::cube(20)?,
        n: 10,
        fwhm: 8.0,
        noise_sigma: 0.5,
        seed: Seed(5),
    };
    let stack = smooth_random_field(&spec)?.combined;
    let topology = build_lattice_topology(stack.mask(), Connectivity::Faces);
    let labeling = fast_cluster(&stack, &topology, 400)?.labeling;

    let scaled = CompressionModel::new(labeling.clone(), ScalingMode::Scaled);
    let x1 = stack.data().column(0).to_vec();
    let x2 = stack.data().column(1).to_vec();
    let z = scaled.reduce(&x1)?;
    println!("{} voxels -> {} values", x1.len(), z.len());
    println!("eta = {:.4} (never above 1 in scaled mode)", isometry_ratio(&scaled, &x1, &x2)?);

    let mean = CompressionModel::new(labeling, ScalingMode::Mean);
    let smoothed = mean.expand(&mean.reduce(&x1)?)?;
    let err: f64 = x1.iter().zip(&smoothed).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    let energy: f64 = x1.iter().map(|a| a * a).sum();
    println!("relative residual after expand(reduce(x)): {:.4}", (err / energy).sqrt());
    Ok(())
}
