//! Very sparse random projections roughly preserve pairwise distances.

use featagg::{isometry_ratio, Seed, SparseProjection};
use rand::Rng;

fn main() -> featagg::Result<()> {
    let p = 10_000;
    let mut rng = Seed(3).rng();
    let x1: Vec<f64> = (0..p).map(|_| rng.random::<f64>()).collect();
    let x2: Vec<f64> = (0..p).map(|_| rng.random::<f64>()).collect();

    for k in [50, 200, 800, 3200] {
        let etas: Vec<f64> = (0..50)
            .map(|s| isometry_ratio(&SparseProjection::new(p, k, Seed(s))?, &x1, &x2))
            .collect::<featagg::Result<_>>()?;
        let mean = etas.iter().sum::<f64>() / etas.len() as f64;
        let std = (etas.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (etas.len() - 1) as f64).sqrt();
        println!("k = {k:>5}: eta mean {mean:.3}, std {std:.3}");
    }
    let proj = SparseProjection::new(p, 200, Seed(0))?;
    println!("nonzeros in a 200 x {p} matrix: {}", proj.nnz());
    Ok(())
}
