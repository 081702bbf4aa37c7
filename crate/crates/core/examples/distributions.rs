//! Pairwise-distance and tour segment-length histograms of a random set,
//! printed coarsened to 20-unit bands.
//!
//! cargo run --release --example distributions

use tspforge::analysis::{pairwise_distance_histogram, segment_length_histogram, Histogram};
use tspforge::{solve, Instance, SolverConfig, Variant};

fn bands(h: &Histogram, width: f64) -> Vec<f64> {
    let top = h.bins.len() as f64 * h.bin_width;
    (0..(top / width).ceil() as usize)
        .map(|k| h.mass_between(k as f64 * width, (k + 1) as f64 * width))
        .collect()
}

fn main() -> tspforge::Result<()> {
    let set = (0..20)
        .map(|i| Instance::random_member(9, i, 100, 400))
        .collect::<tspforge::Result<Vec<_>>>()?;
    let pairwise = pairwise_distance_histogram(&set)?;
    println!(
        "pairs per instance {}, mean pairs closer than 4: {:.2}",
        pairwise.observations_per_instance,
        pairwise.mass_between(0.0, 4.0)
    );
    for (k, v) in bands(&pairwise, 20.0).iter().enumerate() {
        println!("  pairs {:>3}-{:<3} {:>7.1}", 20 * k, 20 * k + 20, v);
    }

    let cfg = SolverConfig::default();
    let tours = set
        .iter()
        .enumerate()
        .map(|(k, i)| solve(i, Variant::Clk, &cfg, k as u64).map(|s| s.tour.order().to_vec()))
        .collect::<tspforge::Result<Vec<_>>>()?;
    let segments = segment_length_histogram(&tours, &set)?;
    for (k, v) in bands(&segments, 20.0).iter().enumerate() {
        println!("  segments {:>3}-{:<3} {:>6.2}", 20 * k, 20 * k + 20, v);
    }
    Ok(())
}
