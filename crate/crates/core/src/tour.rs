//! Hamiltonian cycles over an instance and the segment-reversal primitive.
//!
//! A [`Tour`] is an array of city indices plus its inverse (city -> position)
//! and a cached length. [`Tour::flip`] is the only way solvers mutate a tour
//! in place; every call is one edge exchange of search effort.

use std::cell::Cell;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{DistanceMatrix, Instance};
use crate::rng::{rng_from_seed, Rng};

thread_local! {
    static FLIP_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Number of [`Tour::flip`] invocations made on the current thread so far.
///
/// Independent of any solver's own effort counter; tests compare the two.
pub fn flip_invocations() -> u64 {
    FLIP_CALLS.with(Cell::get)
}

/// True when `order` is a bijection on `0..n`.
pub fn is_permutation(order: &[usize], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &c in order {
        if c >= n || seen[c] {
            return false;
        }
        seen[c] = true;
    }
    true
}

/// Shared assertion helper: errors unless `order` is a permutation of `0..n`.
pub fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if is_permutation(order, n) {
        Ok(())
    } else {
        Err(Error::usage(format!(
            "tour order is not a permutation of 0..{n}"
        )))
    }
}

/// Cyclic length of `order`, closing edge included.
pub fn tour_length(instance: &Instance, order: &[usize]) -> Result<f64> {
    check_permutation(order, instance.len())?;
    let c = instance.cities();
    Ok(cyclic_length(order, |a, b| c[a].distance(&c[b])))
}

pub(crate) fn cyclic_length(order: &[usize], mut d: impl FnMut(usize, usize) -> f64) -> f64 {
    let n = order.len();
    (0..n).map(|k| d(order[k], order[(k + 1) % n])).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    order: Vec<usize>,
    #[serde(skip)]
    pos: Vec<usize>,
    length: f64,
}

impl Tour {
    pub fn from_order(dist: &DistanceMatrix, order: Vec<usize>) -> Result<Self> {
        check_permutation(&order, dist.len())?;
        let length = cyclic_length(&order, |a, b| dist.get(a, b));
        let mut pos = vec![0; order.len()];
        for (p, &c) in order.iter().enumerate() {
            pos[c] = p;
        }
        Ok(Tour { order, pos, length })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    #[inline]
    pub fn position(&self, city: usize) -> usize {
        self.pos[city]
    }

    #[inline]
    pub fn succ(&self, city: usize) -> usize {
        let p = self.pos[city] + 1;
        self.order[if p == self.order.len() { 0 } else { p }]
    }

    #[inline]
    pub fn pred(&self, city: usize) -> usize {
        let p = self.pos[city];
        self.order[if p == 0 { self.order.len() - 1 } else { p - 1 }]
    }

    /// Recomputes the cached length from scratch.
    pub fn recompute_length(&mut self, dist: &DistanceMatrix) {
        self.length = cyclic_length(&self.order, |a, b| dist.get(a, b));
    }

    /// Reverses the tour segment between positions `i` and `j` (inclusive).
    ///
    /// The cycle produced equals the one obtained by reversing `order[i..=j]`;
    /// when the complementary segment is shorter, that one is reversed
    /// instead, so the array may come out rotated or mirrored. Applying the
    /// same `(i, j)` twice restores the original array exactly. The length is
    /// updated from the two removed and two added edges.
    pub fn flip(&mut self, dist: &DistanceMatrix, i: usize, j: usize) -> Result<()> {
        let n = self.order.len();
        if i >= j || j >= n {
            return Err(Error::usage(format!(
                "flip needs 0 <= i < j < n, got i = {i}, j = {j}, n = {n}"
            )));
        }
        self.flip_unchecked(dist, i, j);
        Ok(())
    }

    pub(crate) fn flip_unchecked(&mut self, dist: &DistanceMatrix, i: usize, j: usize) {
        FLIP_CALLS.with(|c| c.set(c.get() + 1));
        let n = self.order.len();
        let inner = j - i + 1;
        if inner < n {
            let a = self.order[(i + n - 1) % n];
            let b = self.order[i];
            let c = self.order[j];
            let d = self.order[(j + 1) % n];
            self.length += dist.get(a, c) + dist.get(b, d) - dist.get(a, b) - dist.get(c, d);
        }
        let outer = n - inner;
        if inner <= outer {
            self.reverse_run(i, inner);
        } else {
            self.reverse_run((j + 1) % n, outer);
        }
    }

    /// Reverses `len` consecutive positions starting at `start`, wrapping.
    fn reverse_run(&mut self, start: usize, len: usize) {
        let n = self.order.len();
        let mut lo = start;
        let mut hi = (start + len + n - 1) % n;
        for _ in 0..len / 2 {
            self.order.swap(lo, hi);
            self.pos[self.order[lo]] = lo;
            self.pos[self.order[hi]] = hi;
            lo = if lo + 1 == n { 0 } else { lo + 1 };
            hi = if hi == 0 { n - 1 } else { hi - 1 };
        }
    }

    /// Reverses the path that runs forward (in array order) from city `from`
    /// to city `to`. Returns the `(i, j)` handed to [`Tour::flip`] so the
    /// caller can undo it, or `None` when the reversal would not change the
    /// cycle.
    pub(crate) fn reverse_path(
        &mut self,
        dist: &DistanceMatrix,
        from: usize,
        to: usize,
    ) -> Option<(usize, usize)> {
        let n = self.order.len();
        let (i, j) = (self.pos[from], self.pos[to]);
        let (i, j) = if i <= j {
            (i, j)
        } else {
            // The path wraps the array end; its complement does not.
            (j + 1, i - 1)
        };
        if i >= j || j >= n {
            return None;
        }
        self.flip_unchecked(dist, i, j);
        Some((i, j))
    }

    /// Same cycle, starting at city 0 and heading to the smaller neighbour.
    pub fn canonical_order(&self) -> Vec<usize> {
        canonical_order(&self.order)
    }
}

/// Rotates/mirrors a cyclic order so it starts at city 0 and its second
/// element is the smaller of city 0's two neighbours.
pub fn canonical_order(order: &[usize]) -> Vec<usize> {
    let n = order.len();
    let Some(start) = order.iter().position(|&c| c == 0) else {
        return order.to_vec();
    };
    let fwd: Vec<usize> = (0..n).map(|k| order[(start + k) % n]).collect();
    if n < 3 || fwd[1] < fwd[n - 1] {
        fwd
    } else {
        (0..n).map(|k| order[(start + n - k) % n]).collect()
    }
}

/// Greedy nearest-neighbour construction from `start`; `seed` breaks ties.
pub fn nearest_neighbor_tour(instance: &Instance, start: usize, seed: u64) -> Result<Tour> {
    if start >= instance.len() {
        return Err(Error::usage(format!(
            "start city {start} out of range for n = {}",
            instance.len()
        )));
    }
    let dist = DistanceMatrix::new(instance);
    let mut rng = rng_from_seed(seed);
    Ok(nearest_neighbor_with(&dist, start, &mut rng))
}

pub(crate) fn nearest_neighbor_with(dist: &DistanceMatrix, start: usize, rng: &mut Rng) -> Tour {
    let n = dist.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut current = start;
    visited[current] = true;
    order.push(current);
    let mut ties = Vec::new();
    while order.len() < n {
        let row = dist.row(current);
        let mut best = f64::INFINITY;
        ties.clear();
        for (c, &d) in row.iter().enumerate() {
            if visited[c] {
                continue;
            }
            if d < best {
                best = d;
                ties.clear();
                ties.push(c);
            } else if d == best {
                ties.push(c);
            }
        }
        current = if ties.len() == 1 {
            ties[0]
        } else {
            *ties.choose(rng).expect("at least one unvisited city")
        };
        visited[current] = true;
        order.push(current);
    }
    Tour::from_order(dist, order).expect("construction yields a permutation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn square() -> (Instance, DistanceMatrix) {
        let inst = Instance::from_coords("sq", &[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap();
        let m = DistanceMatrix::new(&inst);
        (inst, m)
    }

    #[test]
    fn right_triangle_length() {
        let inst = Instance::from_coords("t", &[(0, 0), (1, 0), (0, 1)]).unwrap();
        let len = tour_length(&inst, &[0, 1, 2]).unwrap();
        assert!((len - (2.0 + 2f64.sqrt())).abs() < 1e-12);
        assert_eq!(len, tour_length(&inst, &[2, 1, 0]).unwrap());
        assert!((len - tour_length(&inst, &[1, 2, 0]).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn non_permutation_rejected() {
        let inst = Instance::from_coords("t", &[(0, 0), (1, 0), (0, 1)]).unwrap();
        assert!(tour_length(&inst, &[0, 0, 1]).is_err());
        assert!(tour_length(&inst, &[0, 1]).is_err());
        assert!(tour_length(&inst, &[0, 1, 3]).is_err());
    }

    #[test]
    fn uncrossing_flip_on_unit_square() {
        let (_, m) = square();
        // Corners 0=(0,0) 1=(1,0) 2=(1,1) 3=(0,1); [0,2,1,3] crosses.
        let mut t = Tour::from_order(&m, vec![0, 2, 1, 3]).unwrap();
        assert!((t.length() - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        t.flip(&m, 1, 2).unwrap();
        assert_eq!(t.order(), &[0, 1, 2, 3]);
        assert!((t.length() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn flip_is_an_involution() {
        let inst = Instance::random("r", 12, 400, &mut rng_from_seed(3)).unwrap();
        let m = DistanceMatrix::new(&inst);
        let start = Tour::from_order(&m, (0..12).collect()).unwrap();
        for (i, j) in [(0, 3), (2, 10), (1, 11), (0, 11), (5, 6)] {
            let mut t = start.clone();
            t.flip(&m, i, j).unwrap();
            t.flip(&m, i, j).unwrap();
            assert_eq!(t.order(), start.order());
            assert!((t.length() - start.length()).abs() < 1e-9);
        }
    }

    #[test]
    fn whole_tour_flip_keeps_cycle() {
        let inst = Instance::random("r", 9, 400, &mut rng_from_seed(4)).unwrap();
        let m = DistanceMatrix::new(&inst);
        let mut t = Tour::from_order(&m, (0..9).collect()).unwrap();
        let before = t.length();
        t.flip(&m, 0, 8).unwrap();
        let reversed: Vec<usize> = (0..9).rev().collect();
        assert_eq!(t.canonical_order(), canonical_order(&reversed));
        assert_eq!(t.length(), before);
    }

    #[test]
    fn flip_bad_bounds() {
        let (_, m) = square();
        let mut t = Tour::from_order(&m, vec![0, 1, 2, 3]).unwrap();
        assert!(t.flip(&m, 2, 2).is_err());
        assert!(t.flip(&m, 3, 1).is_err());
        assert!(t.flip(&m, 1, 4).is_err());
    }

    #[test]
    fn flips_are_counted_per_thread() {
        let (_, m) = square();
        let mut t = Tour::from_order(&m, vec![0, 1, 2, 3]).unwrap();
        let before = flip_invocations();
        t.flip(&m, 0, 1).unwrap();
        t.flip(&m, 1, 3).unwrap();
        assert!(t.flip(&m, 1, 1).is_err());
        assert_eq!(flip_invocations() - before, 2);
    }

    #[test]
    fn nearest_neighbor_collinear() {
        let inst = Instance::from_coords("c", &[(0, 0), (1, 0), (2, 0)]).unwrap();
        let t = nearest_neighbor_tour(&inst, 0, 1).unwrap();
        assert_eq!(t.order(), &[0, 1, 2]);
        assert!(nearest_neighbor_tour(&inst, 3, 1).is_err());
    }

    #[test]
    fn nearest_neighbor_is_deterministic() {
        let inst = Instance::random("r", 10, 400, &mut rng_from_seed(11)).unwrap();
        let a = nearest_neighbor_tour(&inst, 2, 99).unwrap();
        let b = nearest_neighbor_tour(&inst, 2, 99).unwrap();
        assert_eq!(a, b);
        assert!(is_permutation(a.order(), 10));
    }

    #[test]
    fn canonical_order_ignores_rotation_and_direction() {
        assert_eq!(canonical_order(&[2, 0, 3, 1]), vec![0, 2, 1, 3]);
        assert_eq!(canonical_order(&[3, 0, 2, 1]), vec![0, 2, 1, 3]);
    }
}
