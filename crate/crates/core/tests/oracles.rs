use rand::Rng as _;

use tspforge::analysis::summarize_efforts;
use tspforge::evolver::{mutate_in_place, tournament_select, uniform_crossover, EvaluatedInstance};
use tspforge::exact::{brute_force_optimum, discrepancy, held_karp_optimum, optimum};
use tspforge::rng::rng_from_seed;
use tspforge::{solve, Instance, SolverConfig, Variant};

#[test]
fn crossover_takes_half_from_each_parent() {
    let mut rng = rng_from_seed(11);
    let a = Instance::random("a", 100, 400, &mut rng).unwrap();
    let b = Instance::random("b", 100, 400, &mut rng).unwrap();
    let (mut from_a, mut total) = (0usize, 0usize);
    for _ in 0..500 {
        let c = uniform_crossover(&a, &b, &mut rng).unwrap();
        for k in 0..100 {
            if a.cities()[k] != b.cities()[k] {
                total += 1;
                from_a += usize::from(c.cities()[k] == a.cities()[k]);
            }
        }
    }
    let share = from_a as f64 / total as f64;
    assert!(
        (share - 0.5).abs() < 0.02,
        "share from first parent {share}"
    );
}

#[test]
fn mutation_replaces_pm_of_the_cities() {
    let mut rng = rng_from_seed(12);
    let base = Instance::random("m", 100, 400, &mut rng).unwrap();
    let trials = 2000;
    let replaced: usize = (0..trials)
        .map(|_| mutate_in_place(&mut base.clone(), 0.5, &mut rng))
        .sum();
    let mean = replaced as f64 / trials as f64;
    assert!((mean - 50.0).abs() < 2.0, "mean replacements {mean}");
}

fn population(fitness: impl IntoIterator<Item = u64>) -> Vec<EvaluatedInstance> {
    let inst = Instance::from_coords("x", &[(0, 0), (1, 0), (0, 1)]).unwrap();
    fitness
        .into_iter()
        .map(|f| EvaluatedInstance {
            instance: inst.clone(),
            fitness: f,
            solve_seed: 0,
            capped: false,
        })
        .collect()
}

#[test]
fn tournament_matches_rank_probabilities() {
    // With distinct fitness, the individual beating r others wins with
    // probability r / C(30, 2); the best one with 29/435 = 1/15.
    let pop = population((0..30).map(|k| 10 * k));
    let mut rng = rng_from_seed(13);
    let draws = 150_000;
    let mut counts = [0usize; 30];
    for _ in 0..draws {
        counts[tournament_select(&pop, &mut rng).unwrap()] += 1;
    }
    assert_eq!(counts[0], 0);
    let best = counts[29] as f64 / draws as f64;
    assert!((best - 1.0 / 15.0).abs() < 0.003, "best wins {best}");
    let chi2: f64 = (1..30)
        .map(|r| {
            let expected = draws as f64 * r as f64 / 435.0;
            (counts[r] as f64 - expected).powi(2) / expected
        })
        .sum();
    // 28 degrees of freedom, 0.999 quantile 56.89
    assert!(chi2 < 56.89, "chi-square {chi2}");
}

#[test]
fn tournament_ties_are_fair() {
    let pop = population([5, 5]);
    let mut rng = rng_from_seed(14);
    let first = (0..20_000)
        .filter(|_| tournament_select(&pop, &mut rng).unwrap() == 0)
        .count();
    assert!((first as f64 / 20_000.0 - 0.5).abs() < 0.02);
}

#[test]
fn held_karp_agrees_with_enumeration() {
    let mut rng = rng_from_seed(15);
    for k in 0..40 {
        let inst = Instance::random("r", 4 + k % 7, 400, &mut rng).unwrap();
        let hk = held_karp_optimum(&inst).unwrap();
        let bf = brute_force_optimum(&inst).unwrap();
        assert_eq!(hk.optimal_length, bf.optimal_length);
        assert_eq!(hk.optimal_order, bf.optimal_order);
    }
}

#[test]
fn lattice_optimum_is_known() {
    // 2 x 3 unit lattice: the boundary cycle of length 6 is optimal.
    let inst =
        Instance::from_coords("lat", &[(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)]).unwrap();
    assert!((optimum(&inst).unwrap().optimal_length - 6.0).abs() < 1e-12);
    // 4 x 4 lattice with unit spacing: 16.
    let pts: Vec<(u32, u32)> = (0..16).map(|k| (k % 4, k / 4)).collect();
    let inst = Instance::from_coords("lat16", &pts).unwrap();
    assert!((optimum(&inst).unwrap().optimal_length - 16.0).abs() < 1e-12);
}

#[test]
fn solvers_reach_lattice_optimum() {
    let pts: Vec<(u32, u32)> = (0..16).map(|k| (10 * (k % 4), 10 * (k / 4))).collect();
    let inst = Instance::from_coords("lat16", &pts).unwrap();
    let s = solve(&inst, Variant::Clk, &SolverConfig::default(), 3).unwrap();
    assert!((s.length() - 160.0).abs() < 1e-9);
}

#[test]
fn discrepancy_is_percent_excess() {
    assert!((discrepancy(105.0, 100.0).unwrap() - 5.0).abs() < 1e-12);
    assert_eq!(discrepancy(100.0, 100.0).unwrap(), 0.0);
    assert!(discrepancy(99.0, 100.0).is_err());
}

#[test]
fn nearest_rank_summary_of_one_to_hundred() {
    let values: Vec<u64> = (1..=100).collect();
    let s = summarize_efforts(&values).unwrap();
    assert_eq!(s.median, 50);
    assert_eq!(s.p5, 5);
    assert_eq!(s.p95, 95);
    assert!((s.mean - 50.5).abs() < 1e-12);
    // population stdev of 1..=100 = sqrt((100^2 - 1) / 12)
    assert!((s.stdev - (9999.0f64 / 12.0).sqrt()).abs() < 1e-9);
}

#[test]
fn chained_lk_beats_the_single_pass_on_random_sets() {
    let mut rng = rng_from_seed(16);
    let cfg = SolverConfig::default();
    let (mut clk, mut cc) = (Vec::new(), Vec::new());
    for k in 0..20u64 {
        let n = rng.gen_range(60..=100);
        let inst = Instance::random("r", n, 400, &mut rng).unwrap();
        clk.push(solve(&inst, Variant::Clk, &cfg, k).unwrap().edge_exchanges);
        cc.push(solve(&inst, Variant::LkCc, &cfg, k).unwrap().edge_exchanges);
    }
    let (m_clk, m_cc) = (
        summarize_efforts(&clk).unwrap().median,
        summarize_efforts(&cc).unwrap().median,
    );
    assert!(m_cc < m_clk, "LK-CC median {m_cc} vs CLK {m_clk}");
}

#[test]
fn clk_random_effort_is_within_a_factor_five_of_the_reference_scale() {
    // Reference: mean 130,539 edge exchanges on uniform 100-city instances.
    let cfg = SolverConfig::default();
    let efforts: Vec<u64> = (0..20)
        .map(|i| {
            let inst = Instance::random_member(99, i, 100, 400).unwrap();
            solve(&inst, Variant::Clk, &cfg, i as u64)
                .unwrap()
                .edge_exchanges
        })
        .collect();
    let mean = summarize_efforts(&efforts).unwrap().mean;
    assert!(
        mean > 130_539.0 / 5.0 && mean < 130_539.0 * 5.0,
        "mean {mean}"
    );
}
