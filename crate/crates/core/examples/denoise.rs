//! Cluster averaging raises the condition-to-subject variance ratio.

use featagg::experiments::denoise;
use featagg::synth::SubjectConditionSpec;
use featagg::{GridShape, Seed};

fn main() -> featagg::Result<()> {
    let spec = SubjectConditionSpec::with_defaults(GridShape::cube(20)?, Seed(6));
    let p = spec.shape.n_cells();
    let ks = [p / 20, p / 10, p / 5, p / 2, p];
    for r in denoise(&spec, &ks)? {
        let s = r.summary().expect("no degenerate voxels");
        println!(
            "k = {:>5}: median log quotient {:+.4} (q1 {:+.4}, q3 {:+.4}), excluded {}",
            r.k, s.median, s.q1, s.q3, r.excluded
        );
    }
    Ok(())
}
