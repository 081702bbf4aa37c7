//! Lin-Kernighan solvers with edge-exchange accounting.
//!
//! Search effort is the number of segment reversals ([`Tour::flip`] calls)
//! a solve performs, counting tentative reversals and the reversals that undo
//! them. Two variants are provided:
//!
//! * [`chained_lk`]: LK, then a chain of double-bridge kicks each followed by
//!   a local LK repair, keeping the kicked tour when it is not longer.
//! * [`lk_cc`]: a single LK pass guided by cluster (bottleneck) distances:
//!   candidates are ranked by length minus cluster distance, and partial
//!   moves that cannot pay the bottleneck back to their base are pruned.

mod bottleneck;
mod engine;

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use bottleneck::{cluster_distances, minimum_spanning_tree, ClusterDistanceMatrix};
pub use engine::{
    candidate_lists, lk_optimize, lk_optimize_with, CompensatedCost, MoveScorer, SearchSpace,
    TrueCost,
};

use crate::error::{Error, Result};
use crate::instance::{DistanceMatrix, Instance};
use crate::rng::{rng_from_seed, Rng};
use crate::tour::{nearest_neighbor_with, Tour};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "clk")]
    Clk,
    #[serde(rename = "lk-cc")]
    LkCc,
    #[serde(rename = "lk")]
    PlainLk,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Clk => "clk",
            Variant::LkCc => "lk-cc",
            Variant::PlainLk => "lk",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "clk" => Ok(Variant::Clk),
            "lk-cc" | "lkcc" | "cc-lk" => Ok(Variant::LkCc),
            "lk" => Ok(Variant::PlainLk),
            _ => Err(Error::usage(format!(
                "unknown solver variant `{s}` (expected clk, lk-cc or lk)"
            ))),
        }
    }
}

/// Tuning knobs of the move engine and the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub neighbor_list_size: usize,
    /// Alternatives tried at each of the first two levels of a move.
    pub backtrack_breadth: usize,
    pub max_depth: usize,
    /// Kicks per chained solve, as a multiple of the city count.
    pub chain_length_factor: f64,
    /// Stop a solve once this many edge exchanges have been spent.
    pub effort_cap: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            neighbor_list_size: 8,
            backtrack_breadth: 5,
            max_depth: 5,
            chain_length_factor: 1.0,
            effort_cap: Some(100_000_000),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |k: &str| Err(Error::Config(format!("solver.{k} must be positive")));
        if self.neighbor_list_size == 0 {
            return bad("neighbor_list_size");
        }
        if self.backtrack_breadth == 0 {
            return bad("backtrack_breadth");
        }
        if self.max_depth == 0 {
            return bad("max_depth");
        }
        if !(self.chain_length_factor > 0.0 && self.chain_length_factor.is_finite()) {
            return bad("chain_length_factor");
        }
        if self.effort_cap == Some(0) {
            return bad("effort_cap");
        }
        Ok(())
    }

    pub fn chain_length(&self, n: usize) -> usize {
        (self.chain_length_factor * n as f64).ceil() as usize
    }
}

/// Running count of edge exchanges for one solve.
#[derive(Debug, Clone, Default)]
pub struct EffortCounter {
    exchanges: u64,
    cap: Option<u64>,
    capped: bool,
}

impl EffortCounter {
    pub fn new(cap: Option<u64>) -> Self {
        EffortCounter {
            exchanges: 0,
            cap,
            capped: false,
        }
    }

    #[inline]
    pub fn record_exchange(&mut self) {
        self.exchanges += 1;
    }

    pub fn exchanges(&self) -> u64 {
        self.exchanges
    }

    /// True once the cap is reached; latches the capped flag.
    #[inline]
    pub fn exhausted(&mut self) -> bool {
        if let Some(cap) = self.cap {
            if self.exchanges >= cap {
                self.capped = true;
            }
        }
        self.capped
    }

    pub fn capped(&self) -> bool {
        self.capped
    }
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub tour: Tour,
    pub edge_exchanges: u64,
    pub seed: u64,
    pub variant: Variant,
    pub capped: bool,
    /// Length of the nearest-neighbour tour the solve started from.
    pub initial_length: f64,
}

impl SolveStats {
    pub const CSV_HEADER: [&'static str; 6] = [
        "instance_id",
        "variant",
        "seed",
        "length",
        "edge_exchanges",
        "capped",
    ];

    pub fn csv_record(&self, instance_id: &str) -> [String; 6] {
        [
            instance_id.to_string(),
            self.variant.to_string(),
            self.seed.to_string(),
            self.tour.length().to_string(),
            self.edge_exchanges.to_string(),
            self.capped.to_string(),
        ]
    }

    pub fn length(&self) -> f64 {
        self.tour.length()
    }
}

struct Start {
    tour: Tour,
    active: Vec<usize>,
    rng: Rng,
}

fn construct(dist: &DistanceMatrix, seed: u64) -> Start {
    let mut rng = rng_from_seed(seed);
    let n = dist.len();
    let start = rng.gen_range(0..n);
    let tour = nearest_neighbor_with(dist, start, &mut rng);
    let mut active: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(active.as_mut_slice(), &mut rng);
    Start { tour, active, rng }
}

/// Double-bridge kick: cuts the tour at three random positions into
/// `A B C D` and reconnects as `A C B D`. Returns the eight endpoints of the
/// four changed edges. Needs at least 4 cities.
pub fn double_bridge(tour: &mut Tour, dist: &DistanceMatrix, rng: &mut Rng) -> Vec<usize> {
    let n = tour.len();
    debug_assert!(n >= 4);
    let mut cuts = sample(rng, n - 1, 3).into_vec();
    cuts.sort_unstable();
    let (p1, p2, p3) = (cuts[0] + 1, cuts[1] + 1, cuts[2] + 1);
    let o = tour.order();
    let ends = vec![
        o[p1 - 1],
        o[p1],
        o[p2 - 1],
        o[p2],
        o[p3 - 1],
        o[p3 % n],
        o[0],
        o[n - 1],
    ];
    let mut order = Vec::with_capacity(n);
    order.extend_from_slice(&o[..p1]);
    order.extend_from_slice(&o[p2..p3]);
    order.extend_from_slice(&o[p1..p2]);
    order.extend_from_slice(&o[p3..]);
    *tour = Tour::from_order(dist, order).expect("kick preserves the permutation");
    ends
}

fn check_instance(instance: &Instance, config: &SolverConfig) -> Result<()> {
    config.validate()?;
    if instance.len() < 3 {
        return Err(Error::usage("solvers need at least 3 cities"));
    }
    Ok(())
}

/// Chained Lin-Kernighan.
pub fn chained_lk(instance: &Instance, config: &SolverConfig, seed: u64) -> Result<SolveStats> {
    check_instance(instance, config)?;
    let space = SearchSpace::new(instance, config.neighbor_list_size);
    let dist = space.dist();
    let Start {
        mut tour,
        active,
        mut rng,
    } = construct(dist, seed);
    let initial_length = tour.length();
    let mut effort = EffortCounter::new(config.effort_cap);
    let scorer = TrueCost(dist);
    lk_optimize_with(&space, &scorer, &mut tour, &active, config, &mut effort);

    let n = instance.len();
    if n >= 4 {
        for _ in 0..config.chain_length(n) {
            if effort.exhausted() {
                break;
            }
            let mut trial = tour.clone();
            let ends = double_bridge(&mut trial, dist, &mut rng);
            lk_optimize_with(&space, &scorer, &mut trial, &ends, config, &mut effort);
            if trial.length() <= tour.length() {
                tour = trial;
            }
        }
    }
    Ok(SolveStats {
        tour,
        edge_exchanges: effort.exchanges(),
        seed,
        variant: Variant::Clk,
        capped: effort.capped(),
        initial_length,
    })
}

/// Lin-Kernighan with cluster compensation: one pass from the construction
/// tour, guided by [`CompensatedCost`].
pub fn lk_cc(instance: &Instance, config: &SolverConfig, seed: u64) -> Result<SolveStats> {
    check_instance(instance, config)?;
    let space = SearchSpace::new(instance, config.neighbor_list_size).with_cluster_distances();
    let Start {
        mut tour, active, ..
    } = construct(space.dist(), seed);
    let initial_length = tour.length();
    let mut effort = EffortCounter::new(config.effort_cap);
    let scorer = CompensatedCost {
        dist: space.dist(),
        cluster: space.cluster().expect("cluster distances computed"),
    };
    lk_optimize_with(&space, &scorer, &mut tour, &active, config, &mut effort);
    Ok(SolveStats {
        tour,
        edge_exchanges: effort.exchanges(),
        seed,
        variant: Variant::LkCc,
        capped: effort.capped(),
        initial_length,
    })
}

/// A single uncompensated LK pass; the common core of both variants.
pub fn plain_lk(instance: &Instance, config: &SolverConfig, seed: u64) -> Result<SolveStats> {
    check_instance(instance, config)?;
    let space = SearchSpace::new(instance, config.neighbor_list_size);
    let Start {
        mut tour, active, ..
    } = construct(space.dist(), seed);
    let initial_length = tour.length();
    let mut effort = EffortCounter::new(config.effort_cap);
    lk_optimize_with(
        &space,
        &TrueCost(space.dist()),
        &mut tour,
        &active,
        config,
        &mut effort,
    );
    Ok(SolveStats {
        tour,
        edge_exchanges: effort.exchanges(),
        seed,
        variant: Variant::PlainLk,
        capped: effort.capped(),
        initial_length,
    })
}

pub fn solve(
    instance: &Instance,
    variant: Variant,
    config: &SolverConfig,
    seed: u64,
) -> Result<SolveStats> {
    match variant {
        Variant::Clk => chained_lk(instance, config, seed),
        Variant::LkCc => lk_cc(instance, config, seed),
        Variant::PlainLk => plain_lk(instance, config, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tour::{flip_invocations, is_permutation, tour_length};

    fn square() -> Instance {
        Instance::from_coords("sq", &[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap()
    }

    #[test]
    fn uncrosses_the_unit_square() {
        let inst = square();
        let space = SearchSpace::new(&inst, 8);
        let start = Tour::from_order(space.dist(), vec![0, 2, 1, 3]).unwrap();
        let mut effort = EffortCounter::new(None);
        let mut rng = rng_from_seed(0);
        let tour = lk_optimize(
            &space,
            start,
            &SolverConfig::default(),
            &mut effort,
            &mut rng,
        );
        assert!((tour.length() - 4.0).abs() < 1e-12);
        assert!(effort.exchanges() >= 1);
    }

    #[test]
    fn optimal_start_is_kept() {
        let inst = Instance::random("r", 5, 400, &mut rng_from_seed(8)).unwrap();
        let best = crate::exact::brute_force_optimum(&inst).unwrap();
        let space = SearchSpace::new(&inst, 8);
        let start = Tour::from_order(space.dist(), best.optimal_order.clone()).unwrap();
        let len = start.length();
        let mut effort = EffortCounter::new(None);
        let tour = lk_optimize(
            &space,
            start,
            &SolverConfig::default(),
            &mut effort,
            &mut rng_from_seed(1),
        );
        assert!((tour.length() - len).abs() < 1e-9);
    }

    #[test]
    fn three_cities_are_trivially_optimal() {
        let inst = Instance::from_coords("t", &[(0, 0), (5, 0), (0, 7)]).unwrap();
        let perim = tour_length(&inst, &[0, 1, 2]).unwrap();
        for v in [Variant::Clk, Variant::LkCc, Variant::PlainLk] {
            let s = solve(&inst, v, &SolverConfig::default(), 3).unwrap();
            assert!((s.length() - perim).abs() < 1e-9);
        }
    }

    #[test]
    fn solves_are_deterministic() {
        let inst = Instance::random("r", 40, 400, &mut rng_from_seed(5)).unwrap();
        for v in [Variant::Clk, Variant::LkCc] {
            let a = solve(&inst, v, &SolverConfig::default(), 77).unwrap();
            let b = solve(&inst, v, &SolverConfig::default(), 77).unwrap();
            assert_eq!(
                serde_json::to_string(&a).unwrap(),
                serde_json::to_string(&b).unwrap()
            );
        }
    }

    #[test]
    fn effort_matches_flip_calls() {
        let inst = Instance::random("r", 30, 400, &mut rng_from_seed(6)).unwrap();
        for v in [Variant::Clk, Variant::LkCc, Variant::PlainLk] {
            let before = flip_invocations();
            let s = solve(&inst, v, &SolverConfig::default(), 9).unwrap();
            assert_eq!(flip_invocations() - before, s.edge_exchanges);
        }
    }

    #[test]
    fn cap_truncates_and_flags() {
        let inst = Instance::random("r", 60, 400, &mut rng_from_seed(7)).unwrap();
        let cfg = SolverConfig {
            effort_cap: Some(50),
            ..SolverConfig::default()
        };
        let s = chained_lk(&inst, &cfg, 1).unwrap();
        assert!(s.capped);
        assert!(s.edge_exchanges >= 50);
        assert!(is_permutation(s.tour.order(), 60));
        assert!(s.length() <= s.initial_length + 1e-9);
    }

    #[test]
    fn tight_cluster_still_yields_valid_tour() {
        let pts: Vec<(u32, u32)> = (0..25).map(|i| (200 + i % 5, 200 + i / 5)).collect();
        let inst = Instance::from_coords("blob", &pts).unwrap();
        let s = lk_cc(&inst, &SolverConfig::default(), 4).unwrap();
        assert!(is_permutation(s.tour.order(), 25));
        assert!(s.length() <= s.initial_length + 1e-9);
    }

    #[test]
    fn double_bridge_keeps_permutation() {
        let inst = Instance::random("r", 12, 400, &mut rng_from_seed(2)).unwrap();
        let d = DistanceMatrix::new(&inst);
        let mut t = Tour::from_order(&d, (0..12).collect()).unwrap();
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            double_bridge(&mut t, &d, &mut rng);
            assert!(is_permutation(t.order(), 12));
        }
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            max_depth: 0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!(SolverConfig::default().chain_length(100), 100);
    }

    #[test]
    fn variant_names_round_trip() {
        for v in [Variant::Clk, Variant::LkCc, Variant::PlainLk] {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
        assert!("2opt".parse::<Variant>().is_err());
    }
}
