//! Sequential edge-exchange search (the Lin-Kernighan move engine).
//!
//! Each step of a move is a segment reversal on the array tour: with base
//! city `t1` and current endpoint `t2 = next(t1)`, adding edge `(t2, t3)` and
//! removing `(t4, t3)` with `t4 = prev(t3)` is realised by reversing the path
//! `t2 ..= t4`, after which `t4` becomes the new endpoint. Moves are explored
//! depth-first with a bounded breadth at the first levels; the deepest point
//! of the best improvement is kept and everything after it is undone.

use std::collections::VecDeque;

use rand::seq::SliceRandom;

use super::bottleneck::{cluster_distances, ClusterDistanceMatrix};
use super::{EffortCounter, SolverConfig};
use crate::instance::{DistanceMatrix, Instance};
use crate::rng::Rng;
use crate::tour::Tour;

const EPS: f64 = 1e-7;

/// Per-instance data shared by every LK pass of a solve.
#[derive(Debug, Clone)]
pub struct SearchSpace {
    dist: DistanceMatrix,
    neighbors: Vec<Vec<usize>>,
    cluster: Option<ClusterDistanceMatrix>,
}

impl SearchSpace {
    pub fn new(instance: &Instance, neighbor_list_size: usize) -> Self {
        let dist = DistanceMatrix::new(instance);
        let neighbors = candidate_lists(&dist, neighbor_list_size);
        SearchSpace {
            dist,
            neighbors,
            cluster: None,
        }
    }

    /// Adds the bottleneck matrix needed for compensated guidance.
    pub fn with_cluster_distances(mut self) -> Self {
        self.cluster = Some(cluster_distances(&self.dist));
        self
    }

    pub fn dist(&self) -> &DistanceMatrix {
        &self.dist
    }

    pub fn neighbors(&self, city: usize) -> &[usize] {
        &self.neighbors[city]
    }

    pub fn cluster(&self) -> Option<&ClusterDistanceMatrix> {
        self.cluster.as_ref()
    }
}

/// The `k` nearest cities of every city, nearest first, ties by index.
pub fn candidate_lists(dist: &DistanceMatrix, k: usize) -> Vec<Vec<usize>> {
    let n = dist.len();
    (0..n)
        .map(|c| {
            let mut others: Vec<usize> = (0..n).filter(|&o| o != c).collect();
            others.sort_by(|&a, &b| dist.get(c, a).total_cmp(&dist.get(c, b)).then(a.cmp(&b)));
            others.truncate(k.min(n.saturating_sub(1)));
            others
        })
        .collect()
}

/// How a move under construction is guided.
///
/// Gains always accumulate true lengths and a finished move is kept only if
/// the true tour length drops; a scorer only decides which partial moves are
/// explored and in what order.
pub trait MoveScorer {
    /// Cost charged against the running gain for adding edge `(from, to)`.
    fn added_cost(&self, from: usize, to: usize) -> f64;

    /// Cost used to rank candidate added edges; defaults to `added_cost`.
    fn ranking_cost(&self, from: usize, to: usize) -> f64 {
        self.added_cost(from, to)
    }

    /// Gain a partial move based at `t1` must still hold after adding an
    /// edge into `t3`, or it is pruned.
    fn closing_bound(&self, _t1: usize, _t3: usize) -> f64 {
        0.0
    }
}

/// Plain Lin-Kernighan: an added edge costs its length.
pub struct TrueCost<'a>(pub &'a DistanceMatrix);

impl MoveScorer for TrueCost<'_> {
    #[inline]
    fn added_cost(&self, from: usize, to: usize) -> f64 {
        self.0.get(from, to)
    }
}

/// Cluster compensation.
///
/// Candidates are ranked by compensated cost `d(v, w) - c(v, w)`, so edges
/// inside a cluster look cheap and edges across a high bottleneck keep most
/// of their cost. A partial move is pruned unless its gain still covers the
/// cluster distance from the newly reached city back to `t1`: any edge that
/// eventually closes the tour there costs at least that much.
pub struct CompensatedCost<'a> {
    pub dist: &'a DistanceMatrix,
    pub cluster: &'a ClusterDistanceMatrix,
}

impl MoveScorer for CompensatedCost<'_> {
    #[inline]
    fn added_cost(&self, from: usize, to: usize) -> f64 {
        self.dist.get(from, to)
    }

    #[inline]
    fn ranking_cost(&self, from: usize, to: usize) -> f64 {
        self.dist.get(from, to) - self.cluster.get(from, to)
    }

    #[inline]
    fn closing_bound(&self, t1: usize, t3: usize) -> f64 {
        self.cluster.get(t3, t1)
    }
}

struct Step {
    flip: (usize, usize),
    t2: usize,
    t3: usize,
    t4: usize,
}

struct Engine<'a, S> {
    space: &'a SearchSpace,
    scorer: &'a S,
    config: &'a SolverConfig,
    effort: &'a mut EffortCounter,
    tour: &'a mut Tour,
    stack: Vec<Step>,
    best_len: f64,
    best_depth: usize,
}

impl<S: MoveScorer> Engine<'_, S> {
    #[inline]
    fn next(&self, c: usize, fwd: bool) -> usize {
        if fwd {
            self.tour.succ(c)
        } else {
            self.tour.pred(c)
        }
    }

    #[inline]
    fn prev(&self, c: usize, fwd: bool) -> usize {
        self.next(c, !fwd)
    }

    fn undo_last(&mut self) {
        let step = self.stack.pop().expect("undo on empty move stack");
        self.tour
            .flip_unchecked(self.space.dist(), step.flip.0, step.flip.1);
        self.effort.record_exchange();
    }

    /// Tries to find an improving move starting at `t1`; returns the cities
    /// whose tour neighbourhood changed when one is committed.
    fn improve_from(&mut self, t1: usize) -> Option<Vec<usize>> {
        for fwd in [true, false] {
            let t2 = self.next(t1, fwd);
            self.stack.clear();
            self.best_len = self.tour.length() - EPS;
            self.best_depth = 0;
            let gain = self.space.dist().get(t1, t2);
            if self.step(1, gain, t1, t2, fwd) {
                while self.stack.len() > self.best_depth {
                    self.undo_last();
                }
                let mut touched = vec![t1];
                for s in &self.stack {
                    touched.extend([s.t2, s.t3, s.t4]);
                }
                self.stack.clear();
                return Some(touched);
            }
            if self.effort.exhausted() {
                break;
            }
        }
        None
    }

    fn step(&mut self, level: usize, gain: f64, t1: usize, t2: usize, fwd: bool) -> bool {
        let space = self.space;
        let dist = space.dist();
        let breadth = if level <= 2 {
            self.config.backtrack_breadth
        } else {
            1
        };
        let t2_next = self.next(t2, fwd);
        let mut cands: Vec<(f64, f64, usize, usize)> = Vec::with_capacity(8);
        for &t3 in space.neighbors(t2) {
            if t3 == t1 || t3 == t2_next {
                continue;
            }
            let added = self.scorer.added_cost(t2, t3);
            let g1 = gain - added;
            if g1 - self.scorer.closing_bound(t1, t3) <= EPS {
                continue;
            }
            let t4 = self.prev(t3, fwd);
            cands.push((
                dist.get(t3, t4) - self.scorer.ranking_cost(t2, t3),
                g1,
                t3,
                t4,
            ));
        }
        cands.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.2.cmp(&b.2)));
        cands.truncate(breadth);

        for (_, g1, t3, t4) in cands {
            if self.effort.exhausted() {
                break;
            }
            let flipped = if fwd {
                self.tour.reverse_path(dist, t2, t4)
            } else {
                self.tour.reverse_path(dist, t4, t2)
            };
            let Some(flip) = flipped else { continue };
            self.effort.record_exchange();
            self.stack.push(Step { flip, t2, t3, t4 });
            if self.tour.length() < self.best_len {
                self.best_len = self.tour.length() - EPS;
                self.best_depth = self.stack.len();
            }
            let new_fwd = self.tour.succ(t1) == t4;
            if level < self.config.max_depth {
                self.step(level + 1, g1 + dist.get(t3, t4), t1, t4, new_fwd);
            }
            if self.best_depth > 0 {
                return true;
            }
            self.undo_last();
        }
        false
    }
}

/// Runs LK with don't-look bits until no active city yields an improving
/// move or the effort cap is hit. `active` seeds the work queue in order.
///
/// Every reversal, tentative or undone, is charged to `effort`.
pub fn lk_optimize_with<S: MoveScorer>(
    space: &SearchSpace,
    scorer: &S,
    tour: &mut Tour,
    active: &[usize],
    config: &SolverConfig,
    effort: &mut EffortCounter,
) {
    let n = tour.len();
    let mut queue: VecDeque<usize> = VecDeque::with_capacity(n);
    let mut queued = vec![false; n];
    for &c in active {
        if !queued[c] {
            queued[c] = true;
            queue.push_back(c);
        }
    }
    let mut engine = Engine {
        space,
        scorer,
        config,
        effort,
        tour,
        stack: Vec::new(),
        best_len: 0.0,
        best_depth: 0,
    };
    while let Some(t1) = queue.pop_front() {
        queued[t1] = false;
        if engine.effort.exhausted() {
            break;
        }
        if let Some(touched) = engine.improve_from(t1) {
            for c in touched {
                if !queued[c] {
                    queued[c] = true;
                    queue.push_back(c);
                }
            }
        }
    }
    engine.tour.recompute_length(space.dist());
}

/// Plain LK pass from `start` with every city active in a seeded random
/// order. Returns the improved tour; `effort.capped()` reports truncation.
pub fn lk_optimize(
    space: &SearchSpace,
    start: Tour,
    config: &SolverConfig,
    effort: &mut EffortCounter,
    rng: &mut Rng,
) -> Tour {
    let mut tour = start;
    let mut active: Vec<usize> = (0..tour.len()).collect();
    active.shuffle(rng);
    lk_optimize_with(
        space,
        &TrueCost(space.dist()),
        &mut tour,
        &active,
        config,
        effort,
    );
    tour
}
