//! Solve a few uniform random instances with both variants and compare
//! tour length and edge exchanges.
//!
//! cargo run --release --example solve_random -- [n] [count]

use tspforge::analysis::summarize_efforts;
use tspforge::{solve, Instance, SolverConfig, Variant};

fn main() -> tspforge::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(100, |a| a.parse().expect("n"));
    let count: usize = args.next().map_or(10, |a| a.parse().expect("count"));
    let cfg = SolverConfig::default();

    for variant in [Variant::Clk, Variant::LkCc] {
        let mut efforts = Vec::new();
        let mut lengths = 0.0;
        for i in 0..count {
            let inst = Instance::random_member(1, i, n, 400)?;
            let s = solve(&inst, variant, &cfg, i as u64)?;
            efforts.push(s.edge_exchanges);
            lengths += s.length();
        }
        let e = summarize_efforts(&efforts)?;
        println!(
            "{variant:>6}: mean length {:.1}, effort mean {:.0} (sd {:.0}), median {}, p5 {}, p95 {}",
            lengths / count as f64,
            e.mean,
            e.stdev,
            e.median,
            e.p5,
            e.p95
        );
    }
    Ok(())
}
