//! Exact optima for small instances: exhaustive enumeration (n <= 10) and
//! the Held-Karp subset dynamic program (n <= 20).
//!
//! Both report the length of the canonical form of the optimal cycle
//! (starting at city 0), so the two methods agree bit-for-bit whenever they
//! find the same cycle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{DistanceMatrix, Instance};
use crate::tour::{canonical_order, cyclic_length};

pub const BRUTE_FORCE_MAX: usize = 10;
pub const HELD_KARP_MAX: usize = 20;

/// Relative length difference at or below which a tour counts as optimal.
pub const OPTIMAL_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactMethod {
    BruteForce,
    HeldKarp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub optimal_length: f64,
    pub optimal_order: Vec<usize>,
    pub node_count: usize,
    pub method: ExactMethod,
}

fn finish(dist: &DistanceMatrix, order: &[usize], method: ExactMethod) -> ExactResult {
    let optimal_order = canonical_order(order);
    ExactResult {
        optimal_length: cyclic_length(&optimal_order, |a, b| dist.get(a, b)),
        node_count: optimal_order.len(),
        optimal_order,
        method,
    }
}

/// Enumerates every cycle through city 0 (each undirected cycle once).
pub fn brute_force_optimum(instance: &Instance) -> Result<ExactResult> {
    let n = instance.len();
    if n > BRUTE_FORCE_MAX {
        return Err(Error::usage(format!(
            "brute force is limited to n <= {BRUTE_FORCE_MAX}, got {n}"
        )));
    }
    let dist = DistanceMatrix::new(instance);

    struct Search<'a> {
        dist: &'a DistanceMatrix,
        path: Vec<usize>,
        used: Vec<bool>,
        best: f64,
        best_path: Vec<usize>,
    }

    impl Search<'_> {
        fn go(&mut self, partial: f64) {
            let n = self.used.len();
            let last = *self.path.last().expect("path starts at city 0");
            if self.path.len() == n {
                // Visit each undirected cycle once: second city < last city.
                if self.path[1] < last {
                    let total = partial + self.dist.get(last, 0);
                    if total < self.best {
                        self.best = total;
                        self.best_path.clone_from(&self.path);
                    }
                }
                return;
            }
            for c in 1..n {
                if !self.used[c] {
                    let next = partial + self.dist.get(last, c);
                    self.used[c] = true;
                    self.path.push(c);
                    self.go(next);
                    self.path.pop();
                    self.used[c] = false;
                }
            }
        }
    }

    let mut s = Search {
        dist: &dist,
        path: vec![0],
        used: vec![false; n],
        best: f64::INFINITY,
        best_path: Vec::new(),
    };
    s.used[0] = true;
    s.go(0.0);
    Ok(finish(&dist, &s.best_path, ExactMethod::BruteForce))
}

/// Held-Karp over subsets of cities 1..n, anchored at city 0.
pub fn held_karp_optimum(instance: &Instance) -> Result<ExactResult> {
    let n = instance.len();
    if n > HELD_KARP_MAX {
        return Err(Error::usage(format!(
            "Held-Karp is limited to n <= {HELD_KARP_MAX} (memory grows as 2^n * n), got {n}"
        )));
    }
    let dist = DistanceMatrix::new(instance);
    let m = n - 1; // cities 1..n map to bits 0..m
    let full = 1usize << m;
    // cost[mask * m + j]: shortest path from 0 through `mask`, ending at j+1.
    let mut cost = vec![f64::INFINITY; full * m];
    let mut parent = vec![u8::MAX; full * m];
    for j in 0..m {
        cost[(1 << j) * m + j] = dist.get(0, j + 1);
    }
    for mask in 1..full {
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let here = cost[mask * m + j];
            if here == f64::INFINITY {
                continue;
            }
            let row = dist.row(j + 1);
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = mask | (1 << k);
                let cand = here + row[k + 1];
                let slot = next * m + k;
                if cand < cost[slot] {
                    cost[slot] = cand;
                    parent[slot] = j as u8;
                }
            }
        }
    }
    let last_mask = full - 1;
    let (mut end, _) = (0..m)
        .map(|j| (j, cost[last_mask * m + j] + dist.get(j + 1, 0)))
        .fold((usize::MAX, f64::INFINITY), |best, cur| {
            if cur.1 < best.1 {
                cur
            } else {
                best
            }
        });
    let mut order = Vec::with_capacity(n);
    let mut mask = last_mask;
    while end != usize::MAX && mask != 0 {
        order.push(end + 1);
        let p = parent[mask * m + end];
        mask &= !(1 << end);
        end = if p == u8::MAX { usize::MAX } else { p as usize };
    }
    order.push(0);
    order.reverse();
    Ok(finish(&dist, &order, ExactMethod::HeldKarp))
}

/// Best available exact method for the instance size.
pub fn optimum(instance: &Instance) -> Result<ExactResult> {
    if instance.len() <= 8 {
        brute_force_optimum(instance)
    } else {
        held_karp_optimum(instance)
    }
}

/// Percentage by which `solver_length` exceeds `optimal_length`.
///
/// A solver length below the optimum (beyond 1e-9) means the oracle or the
/// tour is wrong and is reported as an invariant violation.
pub fn discrepancy(solver_length: f64, optimal_length: f64) -> Result<f64> {
    if optimal_length.is_nan() || optimal_length <= 0.0 {
        return Err(Error::usage("optimal length must be positive"));
    }
    if solver_length < optimal_length - 1e-9 {
        return Err(Error::Invariant(format!(
            "tour of length {solver_length} is shorter than the optimum {optimal_length}"
        )));
    }
    Ok(100.0 * (solver_length - optimal_length).max(0.0) / optimal_length)
}

/// True when `length` is within the optimality tolerance of `optimal_length`.
pub fn is_optimal(length: f64, optimal_length: f64) -> bool {
    (length - optimal_length) <= OPTIMAL_REL_TOL * optimal_length
}
