//! Set-level statistics: segment-length and pairwise-distance histograms,
//! effort summaries, the variant-by-set effort table and optimality gaps.

use std::collections::BTreeMap;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{discrepancy, is_optimal};
use crate::instance::Instance;
use crate::lk::{solve, SolveStats, SolverConfig, Variant};
use crate::rng::{derive_seed, Rng};
use crate::tour::check_permutation;

/// Binned counts starting at 0. For set histograms `bins` holds the mean
/// count per instance and `ci95` the half-width of a normal-approximation
/// 95% interval across instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub bins: Vec<f64>,
    pub instances: usize,
    /// Observations contributed by each instance (equal across the set).
    pub observations_per_instance: usize,
    pub ci95: Option<Vec<f64>>,
}

impl Histogram {
    /// Unit-width histogram of one instance's observations.
    pub fn of(values: impl IntoIterator<Item = f64>, bin_width: f64) -> Self {
        let mut bins: Vec<f64> = Vec::new();
        let mut count = 0;
        for v in values {
            let b = (v / bin_width).floor().max(0.0) as usize;
            if bins.len() <= b {
                bins.resize(b + 1, 0.0);
            }
            bins[b] += 1.0;
            count += 1;
        }
        Histogram {
            bin_width,
            bins,
            instances: 1,
            observations_per_instance: count,
            ci95: None,
        }
    }

    pub fn total(&self) -> f64 {
        self.bins.iter().sum()
    }

    /// Mass in bins whose lower edge lies in `[lo, hi)`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        self.bins
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let edge = *k as f64 * self.bin_width;
                edge >= lo && edge < hi
            })
            .map(|(_, v)| v)
            .sum()
    }

    /// Bin-wise mean of per-instance histograms with a 95% band.
    pub fn average(parts: &[Histogram]) -> Result<Histogram> {
        let first = parts
            .first()
            .ok_or_else(|| Error::usage("cannot average an empty set of histograms"))?;
        let m = parts.len() as f64;
        let width = parts.iter().map(|h| h.bins.len()).max().unwrap_or(0);
        let at = |h: &Histogram, k: usize| h.bins.get(k).copied().unwrap_or(0.0);
        let mut bins = vec![0.0; width];
        for h in parts {
            for (k, b) in bins.iter_mut().enumerate() {
                *b += at(h, k);
            }
        }
        bins.iter_mut().for_each(|b| *b /= m);
        let ci95 = (0..width)
            .map(|k| {
                if parts.len() < 2 {
                    return 0.0;
                }
                let var = parts
                    .iter()
                    .map(|h| (at(h, k) - bins[k]).powi(2))
                    .sum::<f64>()
                    / (m - 1.0);
                1.96 * (var / m).sqrt()
            })
            .collect();
        Ok(Histogram {
            bin_width: first.bin_width,
            bins,
            instances: parts.iter().map(|h| h.instances).sum(),
            observations_per_instance: first.observations_per_instance,
            ci95: Some(ci95),
        })
    }

    /// `bin_start,count[,ci95]` rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv_writer();
        if self.ci95.is_some() {
            w.write_record(["bin_start", "mean_count", "ci95"])?;
        } else {
            w.write_record(["bin_start", "count"])?;
        }
        for (k, v) in self.bins.iter().enumerate() {
            let start = (k as f64 * self.bin_width).to_string();
            match &self.ci95 {
                Some(ci) => w.write_record([start, v.to_string(), ci[k].to_string()])?,
                None => w.write_record([start, v.to_string()])?,
            }
        }
        finish_csv(w)
    }
}

pub(crate) fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

pub(crate) fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub const UNIT_BIN: f64 = 1.0;

/// Edge lengths of one tour, binned at unit width.
pub fn tour_segment_histogram(instance: &Instance, order: &[usize]) -> Result<Histogram> {
    check_permutation(order, instance.len())?;
    let c = instance.cities();
    let n = order.len();
    Ok(Histogram::of(
        (0..n).map(|k| c[order[k]].distance(&c[order[(k + 1) % n]])),
        UNIT_BIN,
    ))
}

/// Per-set average of tour segment lengths; `orders[i]` is a tour of
/// `instances[i]`.
pub fn segment_length_histogram(
    orders: &[Vec<usize>],
    instances: &[Instance],
) -> Result<Histogram> {
    if orders.len() != instances.len() {
        return Err(Error::usage(format!(
            "{} tours for {} instances",
            orders.len(),
            instances.len()
        )));
    }
    let parts = orders
        .iter()
        .zip(instances)
        .map(|(o, i)| tour_segment_histogram(i, o))
        .collect::<Result<Vec<_>>>()?;
    Histogram::average(&parts)
}

/// All n(n-1)/2 pairwise distances of one instance, binned at unit width.
pub fn instance_pairwise_histogram(instance: &Instance) -> Histogram {
    let c = instance.cities();
    let n = c.len();
    Histogram::of(
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| c[i].distance(&c[j]))),
        UNIT_BIN,
    )
}

pub fn pairwise_distance_histogram(instances: &[Instance]) -> Result<Histogram> {
    let parts: Vec<Histogram> = instances.iter().map(instance_pairwise_histogram).collect();
    Histogram::average(&parts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffortSummary {
    pub count: usize,
    pub mean: f64,
    /// Population standard deviation (divisor N).
    pub stdev: f64,
    pub median: u64,
    pub p5: u64,
    pub p95: u64,
    pub min: u64,
    pub max: u64,
}

/// Nearest-rank percentile of sorted data: the value at rank ceil(p * N).
pub fn nearest_rank(sorted: &[u64], p: f64) -> u64 {
    let n = sorted.len();
    let rank = ((p * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

pub fn summarize_efforts(values: &[u64]) -> Result<EffortSummary> {
    if values.is_empty() {
        return Err(Error::usage("effort summary of an empty set"));
    }
    let n = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    let var = values
        .iter()
        .map(|&v| (v as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    Ok(EffortSummary {
        count: values.len(),
        mean,
        stdev: var.sqrt(),
        median: nearest_rank(&sorted, 0.5),
        p5: nearest_rank(&sorted, 0.05),
        p95: nearest_rank(&sorted, 0.95),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    })
}

pub fn effort_summary(stats: &[SolveStats]) -> Result<EffortSummary> {
    summarize_efforts(&stats.iter().map(|s| s.edge_exchanges).collect::<Vec<_>>())
}

/// A named set of instances.
#[derive(Debug, Clone)]
pub struct InstanceSet {
    pub name: String,
    pub instances: Vec<Instance>,
}

impl InstanceSet {
    pub fn new(name: impl Into<String>, instances: Vec<Instance>) -> Self {
        InstanceSet {
            name: name.into(),
            instances,
        }
    }
}

/// One solve of a set member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub instance_index: usize,
    pub instance_id: String,
    pub stats: SolveStats,
}

/// Solves every instance `seeds_per_instance` times. The seed of solve `k`
/// of instance `i` is derived from `(master_seed, i, k)`, and results come
/// back in `(i, k)` order regardless of how the work was scheduled.
pub fn solve_set(
    instances: &[Instance],
    variant: Variant,
    config: &SolverConfig,
    master_seed: u64,
    seeds_per_instance: usize,
) -> Result<Vec<SolveRecord>> {
    let jobs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..seeds_per_instance).map(move |k| (i, k)))
        .collect();
    jobs.into_par_iter()
        .map(|(i, k)| {
            let seed = derive_seed(master_seed, &[i as u64, k as u64]);
            let stats = solve(&instances[i], variant, config, seed)?;
            Ok(SolveRecord {
                instance_index: i,
                instance_id: instances[i].id().to_string(),
                stats,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapCell {
    pub set: String,
    pub variant: Variant,
    pub summary: EffortSummary,
    /// Raw efforts in (instance, seed) order.
    pub efforts: Vec<u64>,
}

/// Every variant run on every set, like the cross table of efforts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapTable {
    pub cells: Vec<SwapCell>,
}

impl SwapTable {
    pub fn cell(&self, set: &str, variant: Variant) -> Option<&SwapCell> {
        self.cells
            .iter()
            .find(|c| c.set == set && c.variant == variant)
    }

    /// `set,variant,count,mean,stdev,median,p5,p95` rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv_writer();
        w.write_record([
            "set", "variant", "count", "mean", "stdev", "median", "p5", "p95",
        ])?;
        for c in &self.cells {
            let s = &c.summary;
            w.write_record([
                c.set.clone(),
                c.variant.to_string(),
                s.count.to_string(),
                s.mean.to_string(),
                s.stdev.to_string(),
                s.median.to_string(),
                s.p5.to_string(),
                s.p95.to_string(),
            ])?;
        }
        finish_csv(w)
    }
}

pub fn swap_matrix(
    sets: &[InstanceSet],
    variants: &[Variant],
    config: &SolverConfig,
    master_seed: u64,
    seeds_per_instance: usize,
) -> Result<SwapTable> {
    if sets.is_empty() || sets.iter().any(|s| s.instances.is_empty()) {
        return Err(Error::usage("swap matrix needs non-empty instance sets"));
    }
    let mut cells = Vec::new();
    for set in sets {
        for &variant in variants {
            let records = solve_set(
                &set.instances,
                variant,
                config,
                master_seed,
                seeds_per_instance,
            )?;
            let efforts: Vec<u64> = records.iter().map(|r| r.stats.edge_exchanges).collect();
            cells.push(SwapCell {
                set: set.name.clone(),
                variant,
                summary: summarize_efforts(&efforts)?,
                efforts,
            });
        }
    }
    Ok(SwapTable { cells })
}

/// Optimality gap statistics of a set of solves against known optima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub count: usize,
    pub mean_discrepancy: f64,
    pub stdev_discrepancy: f64,
    pub optimum_hit_rate: f64,
}

pub fn gap_summary(pairs: &[(f64, f64)]) -> Result<GapSummary> {
    if pairs.is_empty() {
        return Err(Error::usage("gap summary of an empty set"));
    }
    let gaps = pairs
        .iter()
        .map(|&(len, opt)| discrepancy(len, opt))
        .collect::<Result<Vec<_>>>()?;
    let n = gaps.len() as f64;
    let mean = gaps.iter().sum::<f64>() / n;
    let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / n;
    let hits = pairs.iter().filter(|&&(l, o)| is_optimal(l, o)).count();
    Ok(GapSummary {
        count: pairs.len(),
        mean_discrepancy: mean,
        stdev_discrepancy: var.sqrt(),
        optimum_hit_rate: hits as f64 / n,
    })
}

/// Median of per-instance groups after resampling instances with
/// replacement.
fn resampled_median(groups: &[Vec<u64>], rng: &mut Rng) -> u64 {
    let mut pool = Vec::new();
    for _ in 0..groups.len() {
        pool.extend_from_slice(&groups[rng.gen_range(0..groups.len())]);
    }
    pool.sort_unstable();
    nearest_rank(&pool, 0.5)
}

/// Fraction of bootstrap replicates (instances resampled with replacement
/// in each set) in which the median of `higher` exceeds the median of
/// `lower`. Each inner vector holds one instance's efforts.
pub fn bootstrap_median_order(
    higher: &[Vec<u64>],
    lower: &[Vec<u64>],
    replicates: usize,
    rng: &mut Rng,
) -> f64 {
    let wins = (0..replicates)
        .filter(|_| resampled_median(higher, rng) > resampled_median(lower, rng))
        .count();
    wins as f64 / replicates as f64
}

/// Groups `(instance_index, effort)` records by instance, in index order.
pub fn efforts_by_instance(records: &[SolveRecord]) -> Vec<Vec<u64>> {
    let mut map: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for r in records {
        map.entry(r.instance_index)
            .or_default()
            .push(r.stats.edge_exchanges);
    }
    map.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_segments() {
        let inst = Instance::from_coords("sq", &[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap();
        let h = tour_segment_histogram(&inst, &[0, 1, 2, 3]).unwrap();
        assert_eq!(h.bins, vec![0.0, 4.0]);
        let two = segment_length_histogram(
            &[vec![0, 1, 2, 3], vec![0, 1, 2, 3]],
            &[inst.clone(), inst.clone()],
        )
        .unwrap();
        assert_eq!(two.bins, h.bins);
        assert!(segment_length_histogram(&[vec![0, 1, 2, 3]], &[inst.clone(), inst]).is_err());
    }

    #[test]
    fn pairwise_counts() {
        let inst = Instance::random("r", 100, 400, &mut crate::rng::rng_from_seed(1)).unwrap();
        assert_eq!(instance_pairwise_histogram(&inst).total(), 4950.0);
        let inst = Instance::from_coords("t", &[(0, 0), (3, 4), (0, 0)]).unwrap();
        let h = instance_pairwise_histogram(&inst);
        assert_eq!(h.total(), 3.0);
        assert_eq!(h.bins[0], 1.0);
        assert_eq!(h.bins[5], 2.0);
    }

    #[test]
    fn summaries() {
        let s = summarize_efforts(&[7, 7, 7]).unwrap();
        assert_eq!((s.mean, s.stdev, s.median), (7.0, 0.0, 7));
        let v: Vec<u64> = (1..=100).collect();
        let s = summarize_efforts(&v).unwrap();
        assert_eq!(s.median, 50);
        assert_eq!(s.p5, 5);
        assert_eq!(s.p95, 95);
        assert!(summarize_efforts(&[]).is_err());
    }

    #[test]
    fn gaps() {
        let g = gap_summary(&[(100.0, 100.0), (102.0, 100.0)]).unwrap();
        assert!((g.mean_discrepancy - 1.0).abs() < 1e-12);
        assert_eq!(g.optimum_hit_rate, 0.5);
        assert!(gap_summary(&[(90.0, 100.0)]).is_err());
    }

    #[test]
    fn bootstrap_detects_clear_orders() {
        let mut rng = crate::rng::rng_from_seed(4);
        let hi: Vec<Vec<u64>> = (0..10).map(|i| vec![1000 + i]).collect();
        let lo: Vec<Vec<u64>> = (0..10).map(|i| vec![10 + i]).collect();
        assert_eq!(bootstrap_median_order(&hi, &lo, 200, &mut rng), 1.0);
        assert_eq!(bootstrap_median_order(&lo, &hi, 200, &mut rng), 0.0);
    }
}
