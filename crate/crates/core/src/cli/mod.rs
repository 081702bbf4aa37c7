//! The `tspforge` command-line front end.
//!
//! Every command takes an optional strict JSON config (`--config`); flags
//! override file values and the master seed falls back to `TSPFORGE_SEED`.
//! All randomness is derived from the master seed per task, so artifacts are
//! byte-identical for any `--jobs`.

mod artifacts;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{
    bootstrap_median_order, efforts_by_instance, gap_summary, pairwise_distance_histogram,
    segment_length_histogram, solve_set, summarize_efforts, GapSummary, Histogram, SolveRecord,
    SwapCell, SwapTable,
};
use crate::cluster::{average_of, cluster_sweep, ClusterSweep, SweepConfig};
use crate::error::{Error, Result};
use crate::evolver::{evolve, EAConfig};
use crate::exact::{optimum, HELD_KARP_MAX};
use crate::instance::Instance;
use crate::lk::{SolveStats, SolverConfig, Variant};
use crate::rng::{derive_seed, rng_from_seed};
use crate::tsplib;

pub use artifacts::SEED_ENV;
use artifacts::{csv_writer, finish_csv, load_config, read_instances, resolve_seed, write, Meta};

#[derive(Debug, Parser)]
#[command(
    name = "tspforge",
    version,
    about = "Evolve and analyse hard Euclidean TSP instances"
)]
struct Cli {
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Strict JSON config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Master seed (falls back to the config file, then TSPFORGE_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write uniform random instances as rand_<seed>_<index>.tsp.
    GenRandom {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        cities: Option<usize>,
        #[arg(long)]
        grid: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run independent EA runs against one solver variant.
    Evolve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        generations: Option<usize>,
        #[arg(long)]
        cities: Option<usize>,
        #[arg(long)]
        grid: Option<u32>,
        /// Population size; offspring per generation follow as size - 1.
        #[arg(long)]
        population: Option<usize>,
        #[arg(long)]
        variant: Option<Variant>,
        /// Draw initial populations from this random set (run r uses members
        /// r*P .. r*P+P-1, matching `gen-random --seed`).
        #[arg(long)]
        random_set_seed: Option<u64>,
        #[arg(long)]
        effort_cap: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve instances and record length and edge exchanges.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        variant: Option<Variant>,
        /// Solves per instance, each with its own derived seed.
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        effort_cap: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Instance files or directories of .tsp files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Exact optima for small instances.
    Exact {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// GDBSCAN cluster-count sweep over a range of epsilons.
    Cluster {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eps_min: Option<u32>,
        #[arg(long)]
        eps_max: Option<u32>,
        #[arg(long)]
        min_pts: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Distributions, the variant-by-set effort table and optimality gaps.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Named instance set, `name=path`; repeat for each set.
        #[arg(long = "set", required = true, value_parser = parse_set)]
        sets: Vec<(String, PathBuf)>,
        /// Comma-separated solver variants.
        #[arg(long, value_delimiter = ',')]
        variants: Option<Vec<Variant>>,
        #[arg(long)]
        seeds: Option<usize>,
        /// Tours whose segments are histogrammed.
        #[arg(long, value_enum)]
        tour_source: Option<TourSource>,
        #[arg(long)]
        effort_cap: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bundle JSON and CSV artifacts under the inputs into one JSON file.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

fn parse_set(s: &str) -> std::result::Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => {
            Ok((name.to_string(), PathBuf::from(path)))
        }
        _ => Err(format!("expected name=path, got `{s}`")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TourSource {
    /// Exact optima when every instance is small enough, else solver tours.
    #[default]
    Auto,
    /// Exact optimum (instances with at most 20 cities).
    Exact,
    /// Shortest tour found by the analysed solver variants.
    Solver,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub master_seed: Option<u64>,
    pub count: usize,
    pub n_cities: usize,
    pub grid_size: u32,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            master_seed: None,
            count: 1,
            n_cities: 100,
            grid_size: 400,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub master_seed: Option<u64>,
    pub runs: usize,
    pub random_set_seed: Option<u64>,
    pub ea: EAConfig,
    pub solver: SolverConfig,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            master_seed: None,
            runs: 1,
            random_set_seed: None,
            ea: EAConfig::default(),
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub master_seed: Option<u64>,
    pub variant: Variant,
    pub seeds_per_instance: usize,
    pub solver: SolverConfig,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            master_seed: None,
            variant: Variant::Clk,
            seeds_per_instance: 1,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExactConfig {
    pub master_seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    pub master_seed: Option<u64>,
    pub sweep: SweepConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub master_seed: Option<u64>,
    pub variants: Vec<Variant>,
    pub seeds_per_instance: usize,
    pub tour_source: TourSource,
    pub bootstrap_replicates: usize,
    pub solver: SolverConfig,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            master_seed: None,
            variants: vec![Variant::Clk, Variant::LkCc],
            seeds_per_instance: 1,
            tour_source: TourSource::Auto,
            bootstrap_replicates: 1000,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub master_seed: Option<u64>,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 success, 1 usage or config error, 2 I/O or parse
/// error, 3 internal invariant violation.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("tspforge: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    if cli.jobs == 0 {
        return Err(Error::usage("--jobs must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| Error::Invariant(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(cli.command))
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::GenRandom {
            common,
            count,
            cities,
            grid,
            out,
        } => {
            let (mut cfg, _) = load_config::<GenConfig>(common.config.as_deref())?;
            override_with(&mut cfg.count, count);
            override_with(&mut cfg.n_cities, cities);
            override_with(&mut cfg.grid_size, grid);
            let seed = resolve_seed(common.seed, cfg.master_seed)?;
            cfg.master_seed = Some(seed);
            gen_random(&cfg, seed, &out)
        }
        Command::Evolve {
            common,
            runs,
            generations,
            cities,
            grid,
            population,
            variant,
            random_set_seed,
            effort_cap,
            out,
        } => {
            let (mut cfg, raw) = load_config::<EvolveConfig>(common.config.as_deref())?;
            if raw.pointer("/ea/master_seed").is_some() {
                return Err(Error::Config(
                    "ea.master_seed is derived per run; set the top-level master_seed instead"
                        .into(),
                ));
            }
            override_with(&mut cfg.runs, runs);
            override_with(&mut cfg.ea.generations, generations);
            override_with(&mut cfg.ea.n_cities, cities);
            override_with(&mut cfg.ea.grid_size, grid);
            override_with(&mut cfg.ea.solver_variant, variant);
            if let Some(p) = population {
                cfg.ea.population_size = p;
                cfg.ea.offspring_per_generation = p.saturating_sub(cfg.ea.elitism);
            }
            if random_set_seed.is_some() {
                cfg.random_set_seed = random_set_seed;
            }
            if effort_cap.is_some() {
                cfg.solver.effort_cap = effort_cap;
            }
            let seed = resolve_seed(common.seed, cfg.master_seed)?;
            cfg.master_seed = Some(seed);
            cmd_evolve(&cfg, seed, &out)
        }
        Command::Solve {
            common,
            variant,
            seeds,
            effort_cap,
            out,
            inputs,
        } => {
            let (mut cfg, _) = load_config::<SolveConfig>(common.config.as_deref())?;
            override_with(&mut cfg.variant, variant);
            override_with(&mut cfg.seeds_per_instance, seeds);
            if effort_cap.is_some() {
                cfg.solver.effort_cap = effort_cap;
            }
            let seed = resolve_seed(common.seed, cfg.master_seed)?;
            cfg.master_seed = Some(seed);
            cmd_solve(&cfg, seed, &inputs, &out)
        }
        Command::Exact {
            common,
            out,
            inputs,
        } => {
            let (mut cfg, _) = load_config::<ExactConfig>(common.config.as_deref())?;
            let seed = resolve_seed(common.seed, cfg.master_seed)?;
            cfg.master_seed = Some(seed);
            cmd_exact(&cfg, seed, &inputs, &out)
        }
        Command::Cluster {
            common,
            eps_min,
            eps_max,
            min_pts,
            out,
            inputs,
        } => {
            let (mut cfg, _) = load_config::<ClusterConfig>(common.config.as_deref())?;
            override_with(&mut cfg.sweep.epsilon_min, eps_min);
            override_with(&mut cfg.sweep.epsilon_max, eps_max);
            override_with(&mut cfg.sweep.min_pts, min_pts);
            let seed = resolve_seed(common.seed, cfg.master_seed)?;
            cfg.master_seed = Some(seed);
            cmd_cluster(&cfg, seed, &inputs, &out)
        }
        Command::Analyze {
            common,
            sets,
            variants,
            seeds,
            tour_source,
            effort_cap,
            out,
        } => {
            let (mut cfg, _) = load_config::<AnalyzeConfig>(common.config.as_deref())?;
            override_with(&mut cfg.variants, variants);
            override_with(&mut cfg.seeds_per_instance, seeds);
            override_with(&mut cfg.tour_source, tour_source);
            if effort_cap.is_some() {
                cfg.solver.effort_cap = effort_cap;
            }
            let seed = resolve_seed(common.seed, cfg.master_seed)?;
            cfg.master_seed = Some(seed);
            cmd_analyze(&cfg, seed, &sets, &out)
        }
        Command::Report {
            common,
            out,
            inputs,
        } => {
            let (mut cfg, _) = load_config::<ReportConfig>(common.config.as_deref())?;
            let seed = resolve_seed(common.seed, cfg.master_seed)?;
            cfg.master_seed = Some(seed);
            cmd_report(&cfg, seed, &inputs, &out)
        }
    }
}

fn override_with<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn gen_random(cfg: &GenConfig, seed: u64, out: &Path) -> Result<()> {
    if cfg.count == 0 {
        return Err(Error::usage("count must be at least 1"));
    }
    let meta = Meta::new("gen-random", seed, cfg);
    for index in 0..cfg.count {
        let inst = Instance::random_member(seed, index, cfg.n_cities, cfg.grid_size)?;
        let comment = meta.tsplib_comment(&format!("index={index}"))?;
        write(
            &out.join(format!("{}.tsp", inst.id())),
            &tsplib::write_string(&inst, &comment),
        )?;
    }
    Ok(())
}

fn cmd_evolve(cfg: &EvolveConfig, seed: u64, out: &Path) -> Result<()> {
    use rayon::prelude::*;

    if cfg.runs == 0 {
        return Err(Error::usage("runs must be at least 1"));
    }
    cfg.ea.validate()?;
    cfg.solver.validate()?;
    let meta = Meta::new("evolve", seed, cfg);
    let pop = cfg.ea.population_size;
    let results = (0..cfg.runs)
        .into_par_iter()
        .map(|r| {
            let ea = EAConfig {
                master_seed: derive_seed(seed, &[r as u64]),
                ..cfg.ea.clone()
            };
            let initial = match cfg.random_set_seed {
                Some(set) => Some(
                    (0..pop)
                        .map(|i| {
                            Instance::random_member(set, r * pop + i, ea.n_cities, ea.grid_size)
                        })
                        .collect::<Result<Vec<_>>>()?,
                ),
                None => None,
            };
            evolve(&ea, &cfg.solver, initial)
        })
        .collect::<Result<Vec<_>>>()?;

    for (r, run) in results.iter().enumerate() {
        let stem = format!("run_{r:03}");
        let hardest = run
            .hardest
            .instance
            .clone()
            .with_id(format!("{}_evolved_{r:03}", cfg.ea.solver_variant));
        let mut doc = serde_json::to_value(run)?;
        if let Value::Object(fields) = &mut doc {
            fields.insert("run".into(), json!(r));
            fields.insert(
                "hardest_tsplib".into(),
                json!(tsplib::write_string(&hardest, "")),
            );
        }
        write(&out.join(format!("{stem}.json")), &meta.json_document(doc)?)?;
        write(
            &out.join(format!("{stem}_fitness.csv")),
            &(meta.csv_preamble()? + &run.fitness_csv()?),
        )?;
        let comment = meta.tsplib_comment(&format!(
            "run={r} effort={} solve_seed={}",
            run.hardest.fitness, run.hardest.solve_seed
        ))?;
        write(
            &out.join("evolved").join(format!("{stem}.tsp")),
            &tsplib::write_string(&hardest, &comment),
        )?;
    }
    Ok(())
}

fn cmd_solve(cfg: &SolveConfig, seed: u64, inputs: &[PathBuf], out: &Path) -> Result<()> {
    if cfg.seeds_per_instance == 0 {
        return Err(Error::usage("seeds must be at least 1"));
    }
    let instances = read_instances(inputs)?;
    let records = solve_set(
        &instances,
        cfg.variant,
        &cfg.solver,
        seed,
        cfg.seeds_per_instance,
    )?;
    let mut w = csv_writer();
    w.write_record(SolveStats::CSV_HEADER)?;
    for r in &records {
        w.write_record(r.stats.csv_record(&r.instance_id))?;
    }
    let meta = Meta::new("solve", seed, cfg);
    write(out, &(meta.csv_preamble()? + &finish_csv(w)?))
}

fn cmd_exact(cfg: &ExactConfig, seed: u64, inputs: &[PathBuf], out: &Path) -> Result<()> {
    use rayon::prelude::*;

    let instances = read_instances(inputs)?;
    let results = instances
        .par_iter()
        .map(optimum)
        .collect::<Result<Vec<_>>>()?;
    let mut w = csv_writer();
    w.write_record([
        "instance_id",
        "n",
        "method",
        "optimal_length",
        "optimal_tour",
    ])?;
    for (inst, r) in instances.iter().zip(&results) {
        let order: Vec<String> = r.optimal_order.iter().map(|c| c.to_string()).collect();
        w.write_record([
            inst.id().to_string(),
            inst.len().to_string(),
            serde_json::to_value(r.method)?
                .as_str()
                .unwrap_or_default()
                .to_string(),
            r.optimal_length.to_string(),
            order.join(" "),
        ])?;
    }
    let meta = Meta::new("exact", seed, cfg);
    write(out, &(meta.csv_preamble()? + &finish_csv(w)?))
}

fn cmd_cluster(cfg: &ClusterConfig, seed: u64, inputs: &[PathBuf], out: &Path) -> Result<()> {
    use rayon::prelude::*;

    cfg.sweep.validate()?;
    let instances = read_instances(inputs)?;
    let sweeps = instances
        .par_iter()
        .map(|i| cluster_sweep(i, &cfg.sweep))
        .collect::<Result<Vec<_>>>()?;
    let mean = average_of(&sweeps)?;
    let meta = Meta::new("cluster", seed, cfg);

    let mut w = csv_writer();
    w.write_record(["instance_id", "epsilon", "cluster_count"])?;
    for (inst, s) in instances.iter().zip(&sweeps) {
        for e in &s.per_epsilon {
            w.write_record([
                inst.id().to_string(),
                e.epsilon.to_string(),
                e.clusters.to_string(),
            ])?;
        }
    }
    write(
        &out.join("per_instance.csv"),
        &(meta.csv_preamble()? + &finish_csv(w)?),
    )?;
    write(
        &out.join("aggregate.csv"),
        &(meta.csv_preamble()? + &sweep_csv(&mean)?),
    )?;
    write(
        &out.join("sweep.json"),
        &meta.json_document(json!({
            "instances": instances.iter().map(Instance::id).collect::<Vec<_>>(),
            "average": mean,
        }))?,
    )
}

fn sweep_csv(sweep: &ClusterSweep) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(["cluster_count", "mean_occurrences"])?;
    for (k, v) in sweep.histogram.iter().enumerate() {
        w.write_record([k.to_string(), v.to_string()])?;
    }
    finish_csv(w)
}

#[derive(Serialize)]
struct SetSummary {
    name: String,
    instances: Vec<String>,
    pairwise: Histogram,
    segments: Histogram,
}

#[derive(Serialize)]
struct Ordering {
    variant: Variant,
    higher: String,
    lower: String,
    confidence: f64,
}

#[derive(Serialize)]
struct GapRow {
    set: String,
    variant: Variant,
    summary: GapSummary,
}

fn cmd_analyze(
    cfg: &AnalyzeConfig,
    seed: u64,
    sets: &[(String, PathBuf)],
    out: &Path,
) -> Result<()> {
    use rayon::prelude::*;

    if cfg.variants.is_empty() {
        return Err(Error::usage("at least one solver variant is needed"));
    }
    if cfg.seeds_per_instance == 0 || cfg.bootstrap_replicates == 0 {
        return Err(Error::Config(
            "seeds_per_instance and bootstrap_replicates must be positive".into(),
        ));
    }
    cfg.solver.validate()?;
    let mut names = std::collections::BTreeSet::new();
    if let Some((dup, _)) = sets.iter().find(|(n, _)| !names.insert(n.clone())) {
        return Err(Error::usage(format!("set `{dup}` given twice")));
    }
    let loaded: Vec<(String, Vec<Instance>)> = sets
        .iter()
        .map(|(name, path)| Ok((name.clone(), read_instances(std::slice::from_ref(path))?)))
        .collect::<Result<_>>()?;
    let small = loaded
        .iter()
        .all(|(_, insts)| insts.iter().all(|i| i.len() <= HELD_KARP_MAX));
    if cfg.tour_source == TourSource::Exact && !small {
        return Err(Error::usage(format!(
            "--tour-source exact needs every instance to have at most {HELD_KARP_MAX} cities"
        )));
    }

    let config_echo = json!({
        "analysis": cfg,
        "sets": loaded.iter().map(|(n, insts)| json!({
            "name": n,
            "instances": insts.iter().map(Instance::id).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    let meta = Meta::new("analyze", seed, &config_echo);

    let mut cells = Vec::new();
    let mut grouped: BTreeMap<(String, Variant), Vec<Vec<u64>>> = BTreeMap::new();
    let mut summaries = Vec::new();
    let mut gaps = Vec::new();
    for (name, insts) in &loaded {
        let optima = if small {
            Some(insts.par_iter().map(optimum).collect::<Result<Vec<_>>>()?)
        } else {
            None
        };
        let mut runs: Vec<Vec<SolveRecord>> = Vec::new();
        for &variant in &cfg.variants {
            let records = solve_set(insts, variant, &cfg.solver, seed, cfg.seeds_per_instance)?;
            let efforts: Vec<u64> = records.iter().map(|r| r.stats.edge_exchanges).collect();
            cells.push(SwapCell {
                set: name.clone(),
                variant,
                summary: summarize_efforts(&efforts)?,
                efforts,
            });
            grouped.insert((name.clone(), variant), efforts_by_instance(&records));
            if let Some(opt) = &optima {
                let pairs: Vec<(f64, f64)> = records
                    .iter()
                    .map(|r| (r.stats.length(), opt[r.instance_index].optimal_length))
                    .collect();
                gaps.push(GapRow {
                    set: name.clone(),
                    variant,
                    summary: gap_summary(&pairs)?,
                });
            }
            runs.push(records);
        }
        let tours: Vec<Vec<usize>> = match (&optima, cfg.tour_source) {
            (Some(opt), TourSource::Exact | TourSource::Auto) => {
                opt.iter().map(|o| o.optimal_order.clone()).collect()
            }
            _ => best_tours(insts.len(), &runs),
        };
        summaries.push(SetSummary {
            name: name.clone(),
            instances: insts.iter().map(|i| i.id().to_string()).collect(),
            pairwise: pairwise_distance_histogram(insts)?,
            segments: segment_length_histogram(&tours, insts)?,
        });
    }
    let table = SwapTable { cells };

    let mut orderings = Vec::new();
    for (vi, &variant) in cfg.variants.iter().enumerate() {
        for (a, (higher, _)) in loaded.iter().enumerate() {
            for (b, (lower, _)) in loaded.iter().enumerate() {
                if a == b {
                    continue;
                }
                let mut rng = rng_from_seed(derive_seed(
                    seed,
                    &[u64::MAX, vi as u64, a as u64, b as u64],
                ));
                let confidence = bootstrap_median_order(
                    &grouped[&(higher.clone(), variant)],
                    &grouped[&(lower.clone(), variant)],
                    cfg.bootstrap_replicates,
                    &mut rng,
                );
                orderings.push(Ordering {
                    variant,
                    higher: higher.clone(),
                    lower: lower.clone(),
                    confidence,
                });
            }
        }
    }

    let preamble = meta.csv_preamble()?;
    for s in &summaries {
        write(
            &out.join(format!("pairwise_{}.csv", s.name)),
            &(preamble.clone() + &s.pairwise.to_csv()?),
        )?;
        write(
            &out.join(format!("segments_{}.csv", s.name)),
            &(preamble.clone() + &s.segments.to_csv()?),
        )?;
    }
    write(
        &out.join("swap.csv"),
        &(preamble.clone() + &table.to_csv()?),
    )?;

    let mut w = csv_writer();
    w.write_record(["variant", "higher", "lower", "confidence"])?;
    for o in &orderings {
        w.write_record([
            o.variant.to_string(),
            o.higher.clone(),
            o.lower.clone(),
            o.confidence.to_string(),
        ])?;
    }
    write(
        &out.join("orderings.csv"),
        &(preamble.clone() + &finish_csv(w)?),
    )?;

    if !gaps.is_empty() {
        let mut w = csv_writer();
        w.write_record([
            "set",
            "variant",
            "count",
            "mean_discrepancy",
            "stdev_discrepancy",
            "optimum_hit_rate",
        ])?;
        for g in &gaps {
            let s = &g.summary;
            w.write_record([
                g.set.clone(),
                g.variant.to_string(),
                s.count.to_string(),
                s.mean_discrepancy.to_string(),
                s.stdev_discrepancy.to_string(),
                s.optimum_hit_rate.to_string(),
            ])?;
        }
        write(&out.join("gaps.csv"), &(preamble + &finish_csv(w)?))?;
    }

    write(
        &out.join("analysis.json"),
        &meta.json_document(json!({
            "sets": summaries,
            "swap": table,
            "orderings": orderings,
            "gaps": gaps,
        }))?,
    )
}

/// Per instance, the shortest tour over all variants and seeds; earlier
/// variants win ties.
fn best_tours(n_instances: usize, runs: &[Vec<SolveRecord>]) -> Vec<Vec<usize>> {
    let mut best: Vec<Option<&SolveStats>> = vec![None; n_instances];
    for r in runs.iter().flatten() {
        let slot = &mut best[r.instance_index];
        if slot.is_none_or(|b| r.stats.length() < b.length()) {
            *slot = Some(&r.stats);
        }
    }
    best.into_iter()
        .map(|s| s.expect("every instance solved").tour.order().to_vec())
        .collect()
}

fn cmd_report(cfg: &ReportConfig, seed: u64, inputs: &[PathBuf], out: &Path) -> Result<()> {
    let mut missing = Vec::new();
    let mut artifacts = serde_json::Map::new();
    for root in inputs {
        if !root.exists() {
            missing.push(root.clone());
            continue;
        }
        let files = if root.is_dir() {
            artifacts::walk(root, &["json", "csv"])?
        } else {
            vec![root.clone()]
        };
        let label = root
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| root.display().to_string());
        for file in files {
            if same_file(&file, out) {
                continue;
            }
            let rel = file.strip_prefix(root).unwrap_or(&file);
            let key = if rel.as_os_str().is_empty() {
                label.clone()
            } else {
                format!("{label}/{}", rel.display())
            };
            artifacts.insert(key, read_artifact(&file)?);
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingFiles(missing));
    }
    if artifacts.is_empty() {
        return Err(Error::usage(
            "no JSON or CSV artifacts found under the inputs",
        ));
    }
    let meta = Meta::new("report", seed, cfg);
    write(out, &meta.json_document(json!({ "artifacts": artifacts }))?)
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

fn read_artifact(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        return serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line(),
            message: format!("{}: {e}", path.display()),
        });
    }
    let preamble: Vec<&str> = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.trim_start_matches('#').trim())
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| Ok(r?.iter().map(str::to_string).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({ "preamble": preamble, "header": header, "rows": rows }))
}
