//! Evolve an instance that is hard for one solver variant and print the
//! fitness trajectory.
//!
//! cargo run --release --example evolve_hard -- [clk|lk-cc] [generations] [n]

use tspforge::evolver::{evolve, EAConfig};
use tspforge::{solve, tsplib, SolverConfig, Variant};

fn main() -> tspforge::Result<()> {
    let mut args = std::env::args().skip(1);
    let variant: Variant = args.next().map_or(Ok(Variant::LkCc), |a| a.parse())?;
    let generations = args.next().map_or(50, |a| a.parse().expect("generations"));
    let n_cities = args.next().map_or(50, |a| a.parse().expect("n"));

    let ea = EAConfig {
        generations,
        n_cities,
        solver_variant: variant,
        master_seed: 7,
        ..EAConfig::default()
    };
    let solver = SolverConfig::default();
    let run = evolve(&ea, &solver, None)?;
    for g in run.generations.iter().step_by((generations / 10).max(1)) {
        println!(
            "gen {:>4}: best {:>8}  mean {:>10.1}",
            g.generation, g.best_fitness, g.mean_fitness
        );
    }

    // Fitness came from one solve; re-solve with fresh seeds for a fair figure.
    let hardest = &run.hardest.instance;
    let mut fresh: Vec<u64> = (0..10)
        .map(|k| solve(hardest, variant, &solver, 1000 + k).map(|s| s.edge_exchanges))
        .collect::<tspforge::Result<_>>()?;
    fresh.sort_unstable();
    println!(
        "initial mean {:.0}, hardest fitness {}, fresh-seed median {}",
        run.generations[0].mean_fitness, run.hardest.fitness, fresh[4]
    );
    print!("{}", tsplib::write_string(hardest, "evolved"));
    Ok(())
}
