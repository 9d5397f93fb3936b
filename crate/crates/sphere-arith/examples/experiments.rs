//! Mass, moment and third-moment experiments over a range of degrees,
//! written as CSV, JSON and SVG.
//!
//! Run with `cargo run --example experiments -- /tmp/sphere-arith-out`.

use std::path::PathBuf;

use sphere_arith::experiments::{emit, gaussian_moment, run_mass, run_moments, run_third_moment, ExperimentConfig};

fn main() -> sphere_arith::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("sphere-arith-experiments"));
    let config = ExperimentConfig {
        nu_min: 4,
        nu_max: 24,
        ..Default::default()
    };
    let moments = run_moments(&config)?;
    for q in &config.moments {
        let name = format!("moment_{q}");
        let last = moments.iter().filter(|r| r.quantity == name).last().unwrap();
        println!("q = {q}: value at nu = {} is {:.4} (Gaussian {})", last.nu, last.value, gaussian_moment(*q));
    }
    for (stem, records) in [("mass", run_mass(&config)?), ("third_moment", run_third_moment(&config)?), ("moments", moments)] {
        for p in emit(&records, &out, stem)? {
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}
