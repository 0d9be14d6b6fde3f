//! Wall-clock scaling of fast clustering against Ward.

use featagg::experiments::bench::log_log_slope;
use featagg::experiments::{bench, BenchConfig};
use featagg::{Method, Reduction, Seed};

fn main() -> featagg::Result<()> {
    let fast = Reduction::Cluster(Method::Fast);
    let rows = bench(&BenchConfig {
        sizes: vec![8, 16, 24, 32],
        n: 25,
        k_ratio: 10,
        repeats: 3,
        fwhm: 8.0,
        methods: vec![fast, Reduction::Cluster(Method::WARD), Reduction::RandomProjection],
        seed: Seed(0),
    })?;
    for r in &rows {
        println!("{:<5} p = {:>6}  {:>9.4} s", r.method.name(), r.p, r.seconds);
    }
    let points: Vec<(usize, f64)> = rows.iter().filter(|r| r.method == fast).map(|r| (r.p, r.seconds)).collect();
    println!("fast clustering log-log slope: {:.2}", log_log_slope(&points));
    Ok(())
}
