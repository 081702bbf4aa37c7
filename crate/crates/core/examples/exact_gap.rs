//! Optimality gap of both variants against Held-Karp on small instances.
//!
//! cargo run --release --example exact_gap -- [n] [count]

use tspforge::analysis::gap_summary;
use tspforge::exact::optimum;
use tspforge::{solve, Instance, SolverConfig, Variant};

fn main() -> tspforge::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(15, |a| a.parse().expect("n"));
    let count: usize = args.next().map_or(50, |a| a.parse().expect("count"));
    let instances = (0..count)
        .map(|i| Instance::random_member(5, i, n, 400))
        .collect::<tspforge::Result<Vec<_>>>()?;
    let optima = instances
        .iter()
        .map(|i| optimum(i).map(|r| r.optimal_length))
        .collect::<tspforge::Result<Vec<_>>>()?;

    for variant in [Variant::Clk, Variant::LkCc] {
        let pairs = instances
            .iter()
            .zip(&optima)
            .enumerate()
            .map(|(k, (inst, &opt))| {
                solve(inst, variant, &SolverConfig::default(), k as u64).map(|s| (s.length(), opt))
            })
            .collect::<tspforge::Result<Vec<_>>>()?;
        let g = gap_summary(&pairs)?;
        println!(
            "{variant:>6}: optimum found {:.1}%, mean discrepancy {:.3}% (sd {:.3})",
            100.0 * g.optimum_hit_rate,
            g.mean_discrepancy,
            g.stdev_discrepancy
        );
    }
    Ok(())
}
