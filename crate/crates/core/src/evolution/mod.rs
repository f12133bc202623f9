//! MOEA/D over multi-tree individuals.
//!
//! Each of the `P` subproblems owns a weight vector `(i / (P - 1), 1 - i / (P - 1))`
//! over (cost, complexity), a neighbourhood of the closest weight vectors and
//! an incumbent. One generation builds one offspring per subproblem from two
//! parents drawn from its neighbourhood, evaluates all offspring (in parallel
//! when threads allow), then applies ideal-point updates, neighbour
//! replacement and archive insertion sequentially in subproblem order. Results
//! therefore do not depend on the thread count.

pub mod archive;
pub mod variation;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::complexity::{individual_complexity, CostModel};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::expr::{build_tree, Individual, InitMethod, Objectives};
use crate::manifold_cost;
use crate::rng::{self, Stream};

pub use archive::{non_dominated, Archive, FrontEntry};
pub use variation::{Bounds, OperatorRates};

/// Smallest objective range used when normalising for decomposition.
pub const RANGE_EPSILON: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionConfig {
    pub generations: usize,
    pub population_size: usize,
    pub p_crossover: f64,
    pub p_standard_mutation: f64,
    pub p_tree_mutation: f64,
    pub min_depth: usize,
    pub max_depth: usize,
    /// Upper depth of the ramped initialisation.
    pub init_depth: usize,
    /// `None` means `max(2, m / 2)`.
    pub max_trees: Option<usize>,
    pub neighbourhood: usize,
    /// Incumbents an offspring may replace.
    pub max_replacements: usize,
    pub seed: u64,
    /// Evaluation threads; 1 evaluates on the calling thread.
    pub threads: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            generations: 1000,
            population_size: 100,
            p_crossover: 0.70,
            p_standard_mutation: 0.15,
            p_tree_mutation: 0.15,
            min_depth: 2,
            max_depth: 14,
            init_depth: 6,
            max_trees: None,
            neighbourhood: 15,
            max_replacements: 2,
            seed: 0,
            threads: 1,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("evo.p_xover", self.p_crossover),
            ("evo.p_mut", self.p_standard_mutation),
            ("evo.p_tree_mut", self.p_tree_mutation),
        ];
        for (key, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!("{key} must lie in [0, 1], got {p}")));
            }
        }
        let sum: f64 = probs.iter().map(|(_, p)| p).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!("probabilities must sum to 1 (got {sum})")));
        }
        if self.population_size < 4 {
            return Err(Error::config("evo.population must be at least 4"));
        }
        if self.neighbourhood < 2 || self.neighbourhood > self.population_size {
            return Err(Error::config(format!(
                "evo.neighbourhood must lie in [2, population] = [2, {}], got {}",
                self.population_size, self.neighbourhood
            )));
        }
        if self.min_depth < 1 || self.min_depth > self.max_depth {
            return Err(Error::config("need 1 <= evo.min_depth <= evo.max_depth"));
        }
        if self.init_depth < self.min_depth || self.init_depth > self.max_depth {
            return Err(Error::config("evo.init_depth must lie in [min_depth, max_depth]"));
        }
        if matches!(self.max_trees, Some(t) if t < 2) {
            return Err(Error::config("evo.max_trees must be at least 2"));
        }
        if self.threads == 0 {
            return Err(Error::config("threads must be at least 1"));
        }
        Ok(())
    }

    pub fn max_trees_for(&self, n_features: usize) -> usize {
        self.max_trees.unwrap_or_else(|| (n_features / 2).max(2))
    }

    pub fn bounds(&self, n_features: usize) -> Bounds {
        Bounds {
            min_depth: self.min_depth,
            max_depth: self.max_depth,
            init_depth: self.init_depth,
            max_trees: self.max_trees_for(n_features),
            n_features,
        }
    }

    pub fn rates(&self) -> OperatorRates {
        OperatorRates {
            crossover: self.p_crossover,
            mutation: self.p_standard_mutation,
            tree_mutation: self.p_tree_mutation,
        }
    }
}

/// Objective point in the space used for decomposition: complexity is
/// compressed with `ln(1 + c)`.
pub fn decomposition_point(o: &Objectives) -> [f64; 2] {
    [o.cost, o.complexity.ln_1p()]
}

/// Weighted Tchebycheff value of `f` after min-max normalisation by the ideal
/// and nadir points. Ranges narrower than [`RANGE_EPSILON`] are widened.
pub fn tchebycheff(f: [f64; 2], weights: [f64; 2], ideal: [f64; 2], nadir: [f64; 2]) -> f64 {
    (0..2)
        .map(|j| {
            let range = (nadir[j] - ideal[j]).max(RANGE_EPSILON);
            weights[j] * (f[j] - ideal[j]) / range
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Evenly spaced weights; subproblem `i` puts `i / (P - 1)` on cost.
pub fn weight_vectors(p: usize) -> Vec<[f64; 2]> {
    (0..p)
        .map(|i| {
            let w = if p > 1 { i as f64 / (p - 1) as f64 } else { 0.5 };
            [w, 1.0 - w]
        })
        .collect()
}

/// Indices of the `t` closest weight vectors to each vector (itself first).
pub fn neighbourhoods(weights: &[[f64; 2]], t: usize) -> Vec<Vec<usize>> {
    weights
        .iter()
        .map(|w| {
            let d = |v: &[f64; 2]| (w[0] - v[0]).powi(2) + (w[1] - v[1]).powi(2);
            let mut idx: Vec<usize> = (0..weights.len()).collect();
            idx.sort_by(|&a, &b| d(&weights[a]).total_cmp(&d(&weights[b])).then(a.cmp(&b)));
            idx.truncate(t);
            idx
        })
        .collect()
}

/// Ramped half-and-half population. Tree counts are uniform in
/// `[2, max_trees]`; tree depths cycle over `[min_depth, init_depth]` with
/// alternating full and grow construction.
pub fn initialise<R: Rng + ?Sized>(config: &EvolutionConfig, n_features: usize, rng: &mut R) -> Vec<Individual> {
    let bounds = config.bounds(n_features);
    let span = bounds.init_depth - bounds.min_depth + 1;
    let mut counter = 0usize;
    (0..config.population_size)
        .map(|_| {
            let n_trees = rng.gen_range(2..=bounds.max_trees);
            let trees = (0..n_trees)
                .map(|_| {
                    let depth = bounds.min_depth + (counter / 2) % span;
                    let method = if counter.is_multiple_of(2) { InitMethod::Full } else { InitMethod::Grow };
                    counter += 1;
                    build_tree(bounds.min_depth, depth, method, n_features, rng)
                })
                .collect();
            Individual::new(trees)
        })
        .collect()
}

pub fn evaluate(ind: &Individual, dataset: &Dataset, model: &CostModel) -> Result<Objectives> {
    Ok(Objectives {
        cost: manifold_cost::cost(ind, dataset),
        complexity: individual_complexity(ind, model)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub min_cost: f64,
    pub min_complexity: f64,
    pub archive_size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    /// Every non-dominated individual seen during the run.
    pub archive: Archive,
    /// Non-dominated subset of the final incumbents.
    pub final_front: Archive,
    pub population: Vec<Individual>,
    pub telemetry: Vec<GenerationStats>,
}

pub fn run(dataset: &Dataset, config: &EvolutionConfig, model: &CostModel) -> Result<RunResult> {
    run_with_observer(dataset, config, model, |_, _| {})
}

/// Like [`run`], calling `observer(generation, archive)` after initialisation
/// (generation 0) and after every generation.
pub fn run_with_observer(
    dataset: &Dataset,
    config: &EvolutionConfig,
    model: &CostModel,
    mut observer: impl FnMut(usize, &Archive),
) -> Result<RunResult> {
    config.validate()?;
    model.validate()?;
    let m = dataset.n_features();
    let bounds = config.bounds(m);
    let rates = config.rates();

    let pool = if config.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.threads)
                .build()
                .map_err(|e| Error::config(format!("cannot start thread pool: {e}")))?,
        )
    } else {
        None
    };
    let evaluate_all = |inds: &mut [Individual]| -> Result<()> {
        let objectives: Vec<Result<Objectives>> = match &pool {
            Some(pool) => pool.install(|| inds.par_iter().map(|i| evaluate(i, dataset, model)).collect()),
            None => inds.iter().map(|i| evaluate(i, dataset, model)).collect(),
        };
        for (ind, o) in inds.iter_mut().zip(objectives) {
            ind.objectives = Some(o?);
        }
        Ok(())
    };

    let mut init_rng = rng::stream(config.seed, Stream::Init);
    let mut rng = rng::stream(config.seed, Stream::Variation);

    let mut population = initialise(config, m, &mut init_rng);
    evaluate_all(&mut population)?;

    let weights = weight_vectors(config.population_size);
    let hoods = neighbourhoods(&weights, config.neighbourhood);
    let point = |ind: &Individual| decomposition_point(&ind.objectives.expect("evaluated"));

    let mut ideal = [f64::INFINITY; 2];
    for ind in &population {
        let p = point(ind);
        ideal = [ideal[0].min(p[0]), ideal[1].min(p[1])];
    }

    let mut archive = non_dominated(&population, 0);
    let mut telemetry = vec![stats(0, &archive)];
    observer(0, &archive);

    for generation in 1..=config.generations {
        let mut nadir = [f64::NEG_INFINITY; 2];
        for ind in &population {
            let p = point(ind);
            nadir = [nadir[0].max(p[0]), nadir[1].max(p[1])];
        }

        let mut offspring: Vec<Individual> = hoods
            .iter()
            .map(|hood| {
                let a = &population[*hood.choose(&mut rng).expect("non-empty")];
                let b = &population[*hood.choose(&mut rng).expect("non-empty")];
                variation::vary(a, b, &rates, &bounds, &mut rng)
            })
            .collect();
        evaluate_all(&mut offspring)?;

        for (i, child) in offspring.iter().enumerate() {
            let f = point(child);
            ideal = [ideal[0].min(f[0]), ideal[1].min(f[1])];
            let nadir_now = [nadir[0].max(ideal[0]), nadir[1].max(ideal[1])];

            let mut order = hoods[i].clone();
            order.shuffle(&mut rng);
            let mut replaced = 0;
            for j in order {
                if replaced >= config.max_replacements {
                    break;
                }
                let incumbent = &population[j];
                let g_child = tchebycheff(f, weights[j], ideal, nadir_now);
                let g_inc = tchebycheff(point(incumbent), weights[j], ideal, nadir_now);
                let better = g_child < g_inc || (g_child == g_inc && child.node_count() < incumbent.node_count());
                if better {
                    population[j] = child.clone();
                    replaced += 1;
                }
            }
            archive.insert_individual(child, generation);
        }

        telemetry.push(stats(generation, &archive));
        observer(generation, &archive);
    }

    let final_front = non_dominated(&population, config.generations);
    Ok(RunResult {
        archive,
        final_front,
        population,
        telemetry,
    })
}

fn stats(generation: usize, archive: &Archive) -> GenerationStats {
    GenerationStats {
        generation,
        min_cost: archive.min_cost().unwrap_or(f64::NAN),
        min_complexity: archive.min_complexity().unwrap_or(f64::NAN),
        archive_size: archive.len(),
    }
}
