//! Generates smooth random fields and writes them as volume files.

use featagg::io::{read_volume, write_volume};
use featagg::synth::{smooth_random_field, SmoothFieldSpec};
use featagg::{GridShape, Seed};

fn main() -> featagg::Result<()> {
    let spec = SmoothFieldSpec {
        shape: GridShape::cube(20)?,
        n: 50,
        fwhm: 8.0,
        noise_sigma: 1.0,
        seed: Seed(42),
    };
    let fields = smooth_random_field(&spec)?;
    let dir = std::env::temp_dir().join("featagg-synthetic");
    std::fs::create_dir_all(&dir)?;
    for (name, stack) in [("signal", &fields.signal), ("noise", &fields.noise), ("combined", &fields.combined)] {
        let path = dir.join(format!("{name}.f32v"));
        write_volume(&path, stack)?;
        let back = read_volume(&path)?;
        println!(
            "{}: {} bytes, p = {}, n = {}",
            path.display(),
            std::fs::metadata(&path)?.len(),
            back.n_voxels(),
            back.n_samples()
        );
    }
    Ok(())
}
