//! GDBSCAN cluster counts across epsilon 10..=80 for a random instance and a
//! planted three-blob instance.
//!
//! cargo run --release --example cluster_sweep

use rand::Rng as _;
use tspforge::cluster::{cluster_sweep, SweepConfig};
use tspforge::rng::rng_from_seed;
use tspforge::Instance;

fn main() -> tspforge::Result<()> {
    let cfg = SweepConfig::default();
    let random = Instance::random_member(3, 0, 100, 400)?;

    let mut rng = rng_from_seed(3);
    let centres = [(80, 80), (300, 120), (180, 320)];
    let coords: Vec<(u32, u32)> = (0..100)
        .map(|k| {
            let (cx, cy) = centres[k % 3];
            (cx + rng.gen_range(0..30), cy + rng.gen_range(0..30))
        })
        .collect();
    let blobs = Instance::from_coords("blobs", &coords)?;

    for inst in [&random, &blobs] {
        let sweep = cluster_sweep(inst, &cfg)?;
        let counts: Vec<String> = sweep
            .histogram
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(|(k, v)| format!("{k}:{v}"))
            .collect();
        println!(
            "{:>12}  clusters:settings  {}",
            inst.id(),
            counts.join("  ")
        );
        println!("{:>12}  mass over 2-6 clusters = {}", "", sweep.mass(2, 6));
    }
    Ok(())
}
