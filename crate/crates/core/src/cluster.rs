//! Density-based clustering of city sets and the epsilon-sweep statistic.
//!
//! A city is a core point when at least `min_pts` other cities lie within
//! Euclidean distance `epsilon`. Clusters are the density-connected
//! components grown from core points in input order; non-core cities within
//! reach of a core point join the first cluster that finds them, the rest are
//! noise.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Point};

/// Neighbourhood cardinality used unless configured otherwise.
pub const DEFAULT_MIN_PTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Noise,
    Cluster(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterResult {
    pub epsilon: f64,
    pub min_pts: usize,
    pub labels: Vec<Label>,
    pub cluster_count: usize,
}

impl ClusterResult {
    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|l| **l == Label::Noise).count()
    }
}

/// Uniform grid of buckets with cell side `epsilon`.
struct GridIndex<'a> {
    points: &'a [Point],
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl<'a> GridIndex<'a> {
    fn new(points: &'a [Point], cell: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::key(p, cell)).or_default().push(i);
        }
        GridIndex {
            points,
            cell,
            buckets,
        }
    }

    fn key(p: &Point, cell: f64) -> (i64, i64) {
        (
            (f64::from(p.x) / cell).floor() as i64,
            (f64::from(p.y) / cell).floor() as i64,
        )
    }

    /// Indices of all other points within `cell` of point `i`, ascending.
    fn neighbors(&self, i: usize, out: &mut Vec<usize>) {
        out.clear();
        let p = &self.points[i];
        let (kx, ky) = Self::key(p, self.cell);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(b) = self.buckets.get(&(kx + dx, ky + dy)) {
                    out.extend(
                        b.iter()
                            .copied()
                            .filter(|&j| j != i && p.distance(&self.points[j]) <= self.cell),
                    );
                }
            }
        }
        out.sort_unstable();
    }
}

pub fn gdbscan(instance: &Instance, epsilon: f64, min_pts: usize) -> Result<ClusterResult> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::usage(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if min_pts == 0 {
        return Err(Error::usage("min_pts must be at least 1"));
    }
    let points = instance.cities();
    let n = points.len();
    let index = GridIndex::new(points, epsilon);
    let mut neighborhoods: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut buf = Vec::new();
    for i in 0..n {
        index.neighbors(i, &mut buf);
        neighborhoods.push(buf.clone());
    }
    let is_core: Vec<bool> = neighborhoods.iter().map(|nb| nb.len() >= min_pts).collect();

    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut clusters = 0;
    let mut frontier = Vec::new();
    for seed in 0..n {
        if labels[seed].is_some() || !is_core[seed] {
            continue;
        }
        let id = clusters;
        clusters += 1;
        labels[seed] = Some(Label::Cluster(id));
        frontier.push(seed);
        while let Some(u) = frontier.pop() {
            for &v in &neighborhoods[u] {
                if labels[v].is_none() {
                    labels[v] = Some(Label::Cluster(id));
                    if is_core[v] {
                        frontier.push(v);
                    }
                }
            }
        }
    }
    Ok(ClusterResult {
        epsilon,
        min_pts,
        labels: labels
            .into_iter()
            .map(|l| l.unwrap_or(Label::Noise))
            .collect(),
        cluster_count: clusters,
    })
}

/// Which cities are core points for `(epsilon, min_pts)`.
pub fn core_points(instance: &Instance, epsilon: f64, min_pts: usize) -> Vec<bool> {
    let index = GridIndex::new(instance.cities(), epsilon);
    let mut buf = Vec::new();
    (0..instance.len())
        .map(|i| {
            index.neighbors(i, &mut buf);
            buf.len() >= min_pts
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub epsilon_min: u32,
    pub epsilon_max: u32,
    pub min_pts: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            epsilon_min: 10,
            epsilon_max: 80,
            min_pts: DEFAULT_MIN_PTS,
        }
    }
}

impl SweepConfig {
    pub fn epsilons(&self) -> impl Iterator<Item = f64> {
        (self.epsilon_min..=self.epsilon_max).map(f64::from)
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon_min == 0 || self.epsilon_min > self.epsilon_max {
            return Err(Error::Config(format!(
                "invalid epsilon range {}..={}",
                self.epsilon_min, self.epsilon_max
            )));
        }
        if self.min_pts == 0 {
            return Err(Error::Config("min_pts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonCount {
    pub epsilon: f64,
    /// Cluster count at this epsilon (a mean when averaged over a set).
    pub clusters: f64,
}

/// Cluster counts across the epsilon range and how often each count occurs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSweep {
    pub per_epsilon: Vec<EpsilonCount>,
    /// `histogram[k]`: (mean) number of epsilon settings that gave k clusters.
    pub histogram: Vec<f64>,
    pub instances: usize,
}

impl ClusterSweep {
    /// Summed occurrences over cluster counts `lo..=hi`.
    pub fn mass(&self, lo: usize, hi: usize) -> f64 {
        self.histogram
            .iter()
            .enumerate()
            .filter(|(k, _)| (lo..=hi).contains(k))
            .map(|(_, v)| v)
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.histogram.iter().sum()
    }
}

pub fn cluster_sweep(instance: &Instance, config: &SweepConfig) -> Result<ClusterSweep> {
    config.validate()?;
    let mut per_epsilon = Vec::new();
    let mut histogram: Vec<f64> = Vec::new();
    for eps in config.epsilons() {
        let r = gdbscan(instance, eps, config.min_pts)?;
        if histogram.len() <= r.cluster_count {
            histogram.resize(r.cluster_count + 1, 0.0);
        }
        histogram[r.cluster_count] += 1.0;
        per_epsilon.push(EpsilonCount {
            epsilon: eps,
            clusters: r.cluster_count as f64,
        });
    }
    Ok(ClusterSweep {
        per_epsilon,
        histogram,
        instances: 1,
    })
}

/// Element-wise mean of per-instance sweeps, in input order.
pub fn average_sweep(instances: &[Instance], config: &SweepConfig) -> Result<ClusterSweep> {
    let sweeps = instances
        .iter()
        .map(|i| cluster_sweep(i, config))
        .collect::<Result<Vec<_>>>()?;
    average_of(&sweeps)
}

pub fn average_of(sweeps: &[ClusterSweep]) -> Result<ClusterSweep> {
    let first = sweeps
        .first()
        .ok_or_else(|| Error::usage("cannot average an empty set of sweeps"))?;
    let m = sweeps.len() as f64;
    let width = sweeps.iter().map(|s| s.histogram.len()).max().unwrap_or(0);
    let mut histogram = vec![0.0; width];
    let mut per_epsilon: Vec<EpsilonCount> = first
        .per_epsilon
        .iter()
        .map(|e| EpsilonCount {
            epsilon: e.epsilon,
            clusters: 0.0,
        })
        .collect();
    for s in sweeps {
        if s.per_epsilon.len() != per_epsilon.len() {
            return Err(Error::usage("sweeps cover different epsilon ranges"));
        }
        for (k, v) in s.histogram.iter().enumerate() {
            histogram[k] += v;
        }
        for (acc, e) in per_epsilon.iter_mut().zip(&s.per_epsilon) {
            acc.clusters += e.clusters;
        }
    }
    histogram.iter_mut().for_each(|v| *v /= m);
    per_epsilon.iter_mut().for_each(|e| e.clusters /= m);
    Ok(ClusterSweep {
        per_epsilon,
        histogram,
        instances: sweeps.iter().map(|s| s.instances).sum(),
    })
}
