//! Evolutionary search for instances that maximise solver effort.
//!
//! Generational loop: every individual is solved once (fitness = edge
//! exchanges), then `offspring_per_generation` children are bred by two-way
//! tournament selection, uniform crossover and per-city mutation, and the
//! next population is the children plus the current best individual.

use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Point};
use crate::lk::{solve, SolverConfig, Variant};
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::tsplib;

/// Seed-path tags keeping the evolver's random streams apart.
const STREAM_SOLVE: u64 = 1;
const STREAM_BREED: u64 = 2;
const STREAM_INIT: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EAConfig {
    pub population_size: usize,
    pub generations: usize,
    pub offspring_per_generation: usize,
    pub elitism: usize,
    pub pm_start: f64,
    pub pm_end: f64,
    pub bias: f64,
    pub n_cities: usize,
    pub grid_size: u32,
    pub master_seed: u64,
    pub solver_variant: Variant,
}

impl Default for EAConfig {
    fn default() -> Self {
        EAConfig {
            population_size: 30,
            generations: 600,
            offspring_per_generation: 29,
            elitism: 1,
            pm_start: 0.5,
            pm_end: 0.01,
            bias: 2.0,
            n_cities: 100,
            grid_size: 400,
            master_seed: 0,
            solver_variant: Variant::Clk,
        }
    }
}

impl EAConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(m));
        if self.elitism != 1 {
            return err(format!("ea.elitism must be 1, got {}", self.elitism));
        }
        if self.offspring_per_generation + self.elitism != self.population_size {
            return err(format!(
                "ea.offspring_per_generation ({}) + ea.elitism ({}) must equal ea.population_size ({})",
                self.offspring_per_generation, self.elitism, self.population_size
            ));
        }
        if self.population_size < 2 {
            return err("ea.population_size must be at least 2".into());
        }
        if !(0.0 < self.pm_end && self.pm_end <= self.pm_start && self.pm_start <= 1.0) {
            return err(format!(
                "need 0 < ea.pm_end <= ea.pm_start <= 1, got pm_end = {}, pm_start = {}",
                self.pm_end, self.pm_start
            ));
        }
        if !(self.bias > 0.0 && self.bias.is_finite()) {
            return err(format!("ea.bias must be positive, got {}", self.bias));
        }
        if self.n_cities < 3 {
            return err("ea.n_cities must be at least 3".into());
        }
        if self.grid_size == 0 {
            return err("ea.grid_size must be positive".into());
        }
        Ok(())
    }
}

/// Mutation probability for a (0-based) generation:
/// `pm_end + (pm_start - pm_end) * 2^(-generation / bias)`.
pub fn mutation_rate(generation: usize, config: &EAConfig) -> f64 {
    config.pm_end + (config.pm_start - config.pm_end) * (-(generation as f64) / config.bias).exp2()
}

/// Each city slot is taken from either parent with probability 1/2.
pub fn uniform_crossover(a: &Instance, b: &Instance, rng: &mut Rng) -> Result<Instance> {
    if a.len() != b.len() || a.grid_size() != b.grid_size() {
        return Err(Error::usage(format!(
            "crossover parents differ in shape: {} cities on {} vs {} cities on {}",
            a.len(),
            a.grid_size(),
            b.len(),
            b.grid_size()
        )));
    }
    let cities: Vec<Point> = a
        .cities()
        .iter()
        .zip(b.cities())
        .map(|(pa, pb)| if rng.gen_bool(0.5) { *pa } else { *pb })
        .collect();
    Instance::new(a.id(), a.grid_size(), cities)
}

/// Replaces each city with a fresh uniform grid point with probability `pm`.
/// Returns how many cities were replaced.
pub fn mutate_in_place(instance: &mut Instance, pm: f64, rng: &mut Rng) -> usize {
    let grid = instance.grid_size();
    let pm = pm.clamp(0.0, 1.0);
    let mut replaced = 0;
    for c in instance.cities_mut() {
        if rng.gen_bool(pm) {
            *c = Point::random(grid, rng);
            replaced += 1;
        }
    }
    replaced
}

pub fn mutate(instance: &Instance, pm: f64, rng: &mut Rng) -> Result<Instance> {
    if !(0.0..=1.0).contains(&pm) {
        return Err(Error::usage(format!(
            "mutation probability {pm} outside [0, 1]"
        )));
    }
    let mut child = instance.clone();
    mutate_in_place(&mut child, pm, rng);
    Ok(child)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedInstance {
    pub instance: Instance,
    pub fitness: u64,
    pub solve_seed: u64,
    pub capped: bool,
}

/// Two-way tournament: two distinct individuals, the fitter wins, ties are
/// a coin flip. Returns the winner's index.
pub fn tournament_select(population: &[EvaluatedInstance], rng: &mut Rng) -> Result<usize> {
    if population.len() < 2 {
        return Err(Error::usage(format!(
            "tournament needs at least 2 individuals, got {}",
            population.len()
        )));
    }
    let pair = sample(rng, population.len(), 2);
    let (i, j) = (pair.index(0), pair.index(1));
    let (fi, fj) = (population[i].fitness, population[j].fitness);
    Ok(if fi > fj {
        i
    } else if fj > fi {
        j
    } else if rng.gen_bool(0.5) {
        i
    } else {
        j
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: u64,
    pub mean_fitness: f64,
    pub best_instance_id: String,
    pub mutation_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionRun {
    pub config: EAConfig,
    pub solver: SolverConfig,
    pub generations: Vec<GenerationRecord>,
    pub hardest: EvaluatedInstance,
    /// Every solver call, initial population included.
    pub solver_invocations: u64,
    /// Solver calls on bred offspring only.
    pub offspring_evaluations: u64,
    pub capped_evaluations: u64,
}

impl EvolutionRun {
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            #[serde(flatten)]
            run: &'a EvolutionRun,
            hardest_tsplib: String,
        }
        let doc = Doc {
            run: self,
            hardest_tsplib: tsplib::write_string(&self.hardest.instance, ""),
        };
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    /// `generation,best_fitness,mean_fitness` rows.
    pub fn fitness_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(["generation", "best_fitness", "mean_fitness"])?;
        for g in &self.generations {
            w.write_record([
                g.generation.to_string(),
                g.best_fitness.to_string(),
                g.mean_fitness.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn evaluate(
    instances: Vec<Instance>,
    generation: usize,
    config: &EAConfig,
    solver: &SolverConfig,
) -> Result<Vec<EvaluatedInstance>> {
    instances
        .into_par_iter()
        .enumerate()
        .map(|(k, instance)| {
            let seed = derive_seed(
                config.master_seed,
                &[STREAM_SOLVE, generation as u64, k as u64],
            );
            let stats = solve(&instance, config.solver_variant, solver, seed)?;
            Ok(EvaluatedInstance {
                instance,
                fitness: stats.edge_exchanges,
                solve_seed: seed,
                capped: stats.capped,
            })
        })
        .collect()
}

/// Index of the fittest individual; the first one wins ties.
fn best_index(population: &[EvaluatedInstance]) -> usize {
    population.iter().enumerate().fold(0, |best, (i, e)| {
        if e.fitness > population[best].fitness {
            i
        } else {
            best
        }
    })
}

fn record(generation: usize, pop: &[EvaluatedInstance], pm: Option<f64>) -> GenerationRecord {
    let b = best_index(pop);
    GenerationRecord {
        generation,
        best_fitness: pop[b].fitness,
        mean_fitness: pop.iter().map(|e| e.fitness as f64).sum::<f64>() / pop.len() as f64,
        best_instance_id: pop[b].instance.id().to_string(),
        mutation_rate: pm,
    }
}

/// Uniform random starting population derived from the master seed.
pub fn random_population(config: &EAConfig) -> Result<Vec<Instance>> {
    (0..config.population_size)
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(config.master_seed, &[STREAM_INIT, i as u64]));
            Instance::random(
                format!("g0_{i}"),
                config.n_cities,
                config.grid_size,
                &mut rng,
            )
        })
        .collect()
}

/// Runs the evolutionary loop for `config.generations` generations.
///
/// Offspring are solved in parallel on the ambient rayon pool; results are
/// gathered by offspring index, so the run does not depend on thread count.
pub fn evolve(
    config: &EAConfig,
    solver: &SolverConfig,
    initial_population: Option<Vec<Instance>>,
) -> Result<EvolutionRun> {
    config.validate()?;
    solver.validate()?;
    let initial = match initial_population {
        Some(p) => {
            if p.len() != config.population_size {
                return Err(Error::usage(format!(
                    "initial population has {} instances, expected {}",
                    p.len(),
                    config.population_size
                )));
            }
            if let Some(bad) = p
                .iter()
                .find(|i| i.len() != config.n_cities || i.grid_size() != config.grid_size)
            {
                return Err(Error::usage(format!(
                    "initial instance `{}` has {} cities on a {} grid, expected {} on {}",
                    bad.id(),
                    bad.len(),
                    bad.grid_size(),
                    config.n_cities,
                    config.grid_size
                )));
            }
            p
        }
        None => random_population(config)?,
    };

    let mut population = evaluate(initial, 0, config, solver)?;
    let mut invocations = population.len() as u64;
    let mut offspring_evals = 0u64;
    let mut capped = population.iter().filter(|e| e.capped).count() as u64;
    let mut generations = vec![record(0, &population, None)];

    for g in 0..config.generations {
        let pm = mutation_rate(g, config);
        let mut rng = rng_from_seed(derive_seed(config.master_seed, &[STREAM_BREED, g as u64]));
        let mut children = Vec::with_capacity(config.offspring_per_generation);
        for k in 0..config.offspring_per_generation {
            let a = tournament_select(&population, &mut rng)?;
            let b = tournament_select(&population, &mut rng)?;
            let mut child =
                uniform_crossover(&population[a].instance, &population[b].instance, &mut rng)?
                    .with_id(format!("g{}_{k}", g + 1));
            mutate_in_place(&mut child, pm, &mut rng);
            children.push(child);
        }
        let evaluated = evaluate(children, g + 1, config, solver)?;
        invocations += evaluated.len() as u64;
        offspring_evals += evaluated.len() as u64;
        capped += evaluated.iter().filter(|e| e.capped).count() as u64;

        let elite = population.swap_remove(best_index(&population));
        population = Vec::with_capacity(config.population_size);
        population.push(elite);
        population.extend(evaluated);
        generations.push(record(g + 1, &population, Some(pm)));
    }

    let hardest = population[best_index(&population)].clone();
    Ok(EvolutionRun {
        config: config.clone(),
        solver: solver.clone(),
        generations,
        hardest,
        solver_invocations: invocations,
        offspring_evaluations: offspring_evals,
        capped_evaluations: capped,
    })
}
