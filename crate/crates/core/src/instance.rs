//! Instances (the evolving genotype) and the Euclidean distance matrix.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, Rng};

/// Number of cities per instance used throughout the experiments.
pub const DEFAULT_CITIES: usize = 100;
/// Side length of the square coordinate grid.
pub const DEFAULT_GRID: u32 = 400;

/// A city location on the integer grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub fn new(x: u32, y: u32) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        let dx = f64::from(self.x) - f64::from(other.x);
        let dy = f64::from(self.y) - f64::from(other.y);
        (dx * dx + dy * dy).sqrt()
    }

    pub(crate) fn random(grid_size: u32, rng: &mut Rng) -> Self {
        Point {
            x: rng.gen_range(0..grid_size),
            y: rng.gen_range(0..grid_size),
        }
    }
}

/// An ordered list of cities on a `grid_size` x `grid_size` grid.
///
/// The order of `cities` is the chromosome: crossover exchanges cities by
/// index. Duplicate coordinates are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    id: String,
    grid_size: u32,
    cities: Vec<Point>,
}

impl Instance {
    pub fn new(id: impl Into<String>, grid_size: u32, cities: Vec<Point>) -> Result<Self> {
        if grid_size == 0 {
            return Err(Error::usage("grid size must be positive"));
        }
        if cities.len() < 3 {
            return Err(Error::usage(format!(
                "an instance needs at least 3 cities, got {}",
                cities.len()
            )));
        }
        if let Some((i, p)) = cities
            .iter()
            .enumerate()
            .find(|(_, p)| p.x >= grid_size || p.y >= grid_size)
        {
            return Err(Error::usage(format!(
                "city {i} at ({}, {}) lies outside the {grid_size}x{grid_size} grid",
                p.x, p.y
            )));
        }
        Ok(Instance {
            id: id.into(),
            grid_size,
            cities,
        })
    }

    /// Builds an instance from coordinate pairs, sizing the grid to fit.
    pub fn from_coords(id: impl Into<String>, coords: &[(u32, u32)]) -> Result<Self> {
        let grid = coords
            .iter()
            .map(|&(x, y)| x.max(y) + 1)
            .max()
            .unwrap_or(1)
            .max(DEFAULT_GRID);
        Self::new(
            id,
            grid,
            coords.iter().map(|&(x, y)| Point::new(x, y)).collect(),
        )
    }

    /// `n` cities sampled uniformly on the grid.
    pub fn random(id: impl Into<String>, n: usize, grid_size: u32, rng: &mut Rng) -> Result<Self> {
        if grid_size == 0 {
            return Err(Error::usage("grid size must be positive"));
        }
        let cities = (0..n).map(|_| Point::random(grid_size, rng)).collect();
        Self::new(id, grid_size, cities)
    }

    /// Member `index` of the uniform random set identified by `set_seed`.
    ///
    /// Any member can be regenerated independently of the others, which lets
    /// the evolver and the `gen-random` command share one random set.
    pub fn random_member(set_seed: u64, index: usize, n: usize, grid_size: u32) -> Result<Self> {
        let mut rng = rng_from_seed(derive_seed(set_seed, &[index as u64]));
        Self::random(random_member_id(set_seed, index), n, grid_size, &mut rng)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn grid_size(&self) -> u32 {
        self.grid_size
    }

    pub fn cities(&self) -> &[Point] {
        &self.cities
    }

    pub(crate) fn cities_mut(&mut self) -> &mut [Point] {
        &mut self.cities
    }

    pub fn len(&self) -> usize {
        self.cities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cities.is_empty()
    }

    /// Euclidean distance between cities `i` and `j`, unrounded.
    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.len();
        if i >= n || j >= n {
            return Err(Error::usage(format!(
                "city index out of range: ({i}, {j}) with n = {n}"
            )));
        }
        Ok(self.cities[i].distance(&self.cities[j]))
    }

    /// Every coordinate multiplied by `factor`, on a grid scaled to match.
    pub fn scaled(&self, factor: u32) -> Result<Self> {
        Self::new(
            self.id.clone(),
            self.grid_size * factor,
            self.cities
                .iter()
                .map(|p| Point::new(p.x * factor, p.y * factor))
                .collect(),
        )
    }
}

/// Naming scheme for members of a generated random set.
pub fn random_member_id(set_seed: u64, index: usize) -> String {
    format!("rand_{set_seed}_{index}")
}

/// Dense symmetric matrix of pairwise Euclidean distances.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(instance: &Instance) -> Self {
        let cities = instance.cities();
        let n = cities.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = cities[i].distance(&cities[j]);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        DistanceMatrix { n, data }
    }

    /// Wraps a precomputed row-major matrix. Used for derived metrics.
    pub(crate) fn from_raw(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        DistanceMatrix { n, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_four_five() {
        let inst = Instance::from_coords("t", &[(0, 0), (3, 4), (1, 1)]).unwrap();
        assert_eq!(inst.distance(0, 1).unwrap(), 5.0);
        assert_eq!(inst.distance(1, 1).unwrap(), 0.0);
    }

    #[test]
    fn grid_diagonal() {
        let inst = Instance::from_coords("t", &[(0, 0), (399, 399), (5, 5)]).unwrap();
        // sqrt(2 * 399^2) = 564.27121138686492447... (mpmath, 30 digits)
        assert!((inst.distance(0, 1).unwrap() - 564.271_211_386_864_9).abs() < 1e-9);
    }

    #[test]
    fn index_out_of_range_is_usage_error() {
        let inst = Instance::from_coords("t", &[(0, 0), (3, 4), (1, 1)]).unwrap();
        assert!(matches!(inst.distance(0, 3), Err(Error::Usage(_))));
    }

    #[test]
    fn rejects_tiny_and_off_grid_instances() {
        assert!(Instance::new("t", 10, vec![Point::new(0, 0), Point::new(1, 1)]).is_err());
        assert!(Instance::new(
            "t",
            10,
            vec![Point::new(0, 0), Point::new(1, 1), Point::new(10, 0)]
        )
        .is_err());
    }

    #[test]
    fn duplicates_have_zero_distance() {
        let inst = Instance::from_coords("t", &[(7, 7), (7, 7), (1, 1)]).unwrap();
        let m = DistanceMatrix::new(&inst);
        assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn random_members_are_reproducible() {
        let a = Instance::random_member(42, 3, 100, 400).unwrap();
        let b = Instance::random_member(42, 3, 100, 400).unwrap();
        let c = Instance::random_member(42, 4, 100, 400).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.cities(), c.cities());
        assert_eq!(a.id(), "rand_42_3");
    }
}
