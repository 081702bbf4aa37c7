//! Evolve a small set against each variant, then solve every set with every
//! variant: the cross table of median efforts.
//!
//! cargo run --release --example swap_table -- [runs] [generations]

use tspforge::analysis::{swap_matrix, InstanceSet};
use tspforge::evolver::{evolve, EAConfig};
use tspforge::rng::derive_seed;
use tspforge::{Instance, SolverConfig, Variant};

fn main() -> tspforge::Result<()> {
    let mut args = std::env::args().skip(1);
    let runs: usize = args.next().map_or(3, |a| a.parse().expect("runs"));
    let generations: usize = args.next().map_or(30, |a| a.parse().expect("generations"));
    let solver = SolverConfig::default();
    let variants = [Variant::Clk, Variant::LkCc];

    let random = (0..runs * 30)
        .map(|i| Instance::random_member(11, i, 40, 400))
        .collect::<tspforge::Result<Vec<_>>>()?;
    let mut sets = vec![InstanceSet::new("random", random.clone())];
    for (vi, &v) in variants.iter().enumerate() {
        let hardest = (0..runs)
            .map(|r| {
                let ea = EAConfig {
                    generations,
                    n_cities: 40,
                    solver_variant: v,
                    master_seed: derive_seed(11, &[vi as u64, r as u64]),
                    ..EAConfig::default()
                };
                let initial = random[r * 30..(r + 1) * 30].to_vec();
                evolve(&ea, &solver, Some(initial)).map(|run| run.hardest.instance)
            })
            .collect::<tspforge::Result<Vec<_>>>()?;
        sets.push(InstanceSet::new(format!("{v}-evolved"), hardest));
    }

    let table = swap_matrix(&sets, &variants, &solver, 99, 5)?;
    print!("{:>16}", "");
    for v in variants {
        print!("{:>10}", v.to_string());
    }
    println!();
    for set in &sets {
        print!("{:>16}", set.name);
        for v in variants {
            print!(
                "{:>10}",
                table.cell(&set.name, v).expect("cell").summary.median
            );
        }
        println!();
    }
    Ok(())
}
