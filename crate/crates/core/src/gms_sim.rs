//! Event-by-event simulation of the GMS(m) chain.
//!
//! Each step is a birth with probability `p` or a death with probability `q`.
//! A death removes the individual of lowest fitness; on an empty system it is
//! an idle step. A birth on an empty system places `m` individuals in that one
//! step. An [`ExcursionRecord`] is emitted each time the system empties.
//!
//! Excursion `j` (0-based) draws all of its randomness, including the idle
//! steps that precede its revival, from ChaCha8 stream `j` under the run seed.
//! Records are therefore a pure function of `(seed, config)` regardless of the
//! number of workers.
//!
//! At `p = 1/2` excursion lengths have infinite mean, so a literal run of
//! 10⁵ excursions costs on the order of 10¹⁰ steps. When the population
//! reaches `fast_forward` individuals the remaining descent to 0 is taken in
//! binomial blocks (see [`first_passage`]) and the newborns of that stretch
//! enter only through their maximum. This is exact in law: the strongest
//! individual born so far is always alive mid-excursion, and the last death
//! removes the maximum over all births. Set `fast_forward` to `None` for a
//! purely event-driven run.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GmsError, Result};
use crate::excursion::{first_passage, max_of_uniforms};
use crate::fitness_law::{mean, ModelParams};
use crate::hypergeom::SeriesControl;
use crate::stats::{histogram, EmpiricalDistribution, Histogram};

/// Per-excursion cap on simulated work (events plus block jumps).
pub const WORK_LIMIT: u64 = 1_000_000_000;

/// Default population size at which an excursion switches to block descent.
pub const DEFAULT_FAST_FORWARD: usize = 256;

/// One completed excursion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcursionRecord {
    /// Steps from the revival step to the emptying death, inclusive (τ).
    pub length: u64,
    /// Individuals born, counting the `m` revival individuals.
    pub births: u64,
    pub deaths: u64,
    /// Fitness of the last individual to die.
    pub strongest_fitness: f64,
}

impl ExcursionRecord {
    /// Checks `deaths = births` and `length = births + deaths - m + 1`.
    pub fn is_consistent(&self, m: u32) -> bool {
        self.births == self.deaths
            && self.births >= m as u64
            && self.length == self.births + self.deaths - m as u64 + 1
    }
}

#[derive(Debug, Clone, Copy)]
struct Member {
    fitness: f64,
    seq: u64,
}

impl PartialEq for Member {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Member {}

impl PartialOrd for Member {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Member {
    // Ties in fitness go to the earlier arrival.
    fn cmp(&self, other: &Self) -> Ordering {
        self.fitness
            .total_cmp(&other.fitness)
            .then(self.seq.cmp(&other.seq))
    }
}

/// Multiset of living fitnesses with O(log n) insert and delete-min.
#[derive(Debug, Default, Clone)]
pub struct Population {
    heap: BinaryHeap<Reverse<Member>>,
    next_seq: u64,
}

impl Population {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, fitness: f64) {
        debug_assert!((0.0..=1.0).contains(&fitness));
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Member { fitness, seq }));
    }

    pub fn pop_min(&mut self) -> Option<f64> {
        self.heap.pop().map(|Reverse(m)| m.fitness)
    }

    pub fn peek_min(&self) -> Option<f64> {
        self.heap.peek().map(|Reverse(m)| m.fitness)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn clear(&mut self) {
        self.heap.clear();
    }
}

/// Stopping rule of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimTarget {
    /// Stop after this many completed excursions.
    Excursions(u64),
    /// Stop once this many birth and death steps have been spent; idle steps
    /// do not count and a trailing incomplete excursion is dropped.
    Steps(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: ModelParams,
    pub target: SimTarget,
    pub seed: u64,
    pub workers: usize,
    pub fast_forward: Option<usize>,
}

impl SimConfig {
    pub fn new(params: ModelParams, target: SimTarget, seed: u64) -> Self {
        SimConfig {
            params,
            target,
            seed,
            workers: 1,
            fast_forward: Some(DEFAULT_FAST_FORWARD),
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_fast_forward(mut self, fast_forward: Option<usize>) -> Self {
        self.fast_forward = fast_forward;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(GmsError::domain("workers must be at least 1"));
        }
        match self.target {
            SimTarget::Excursions(0) => {
                return Err(GmsError::domain("excursion count must be positive"))
            }
            SimTarget::Steps(0) => return Err(GmsError::domain("step count must be positive")),
            _ => {}
        }
        if let Some(level) = self.fast_forward {
            if level < 2 {
                return Err(GmsError::domain("fast-forward population must be at least 2"));
            }
        }
        Ok(())
    }
}

/// The RNG stream owned by excursion `ordinal`.
pub fn excursion_rng(seed: u64, ordinal: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ordinal);
    rng
}

/// Diagnostics of one simulated excursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcursionTrace {
    pub record: ExcursionRecord,
    /// Idle steps spent in the empty state before the revival.
    pub idle_steps: u64,
    /// Largest fitness born in the excursion, tracked independently of the heap.
    pub max_born: f64,
    /// Whether the excursion finished in block descent.
    pub fast_forwarded: bool,
}

/// Runs the chain from the empty state through one revival until it empties again.
pub fn simulate_excursion<R: Rng + ?Sized>(
    params: &ModelParams,
    fast_forward: Option<usize>,
    population: &mut Population,
    rng: &mut R,
) -> Result<ExcursionTrace> {
    let step = Bernoulli::new(params.p()).map_err(|e| GmsError::domain(e.to_string()))?;
    let m = params.m() as u64;
    population.clear();

    // Empty state: a death step is a no-op.
    let mut idle_steps = 0u64;
    while !step.sample(rng) {
        idle_steps += 1;
    }

    let mut max_born = 0.0_f64;
    for _ in 0..m {
        let f: f64 = rng.random();
        max_born = max_born.max(f);
        population.insert(f);
    }
    let mut births = m;
    let mut deaths = 0u64;
    let mut length = 1u64;
    let mut work = 0u64;

    loop {
        if let Some(level) = fast_forward {
            if population.len() >= level {
                let remaining = WORK_LIMIT.saturating_sub(work);
                let walk = first_passage(population.len() as u64, params.p(), rng, remaining)?;
                let tail_max = max_of_uniforms(walk.up_steps, rng);
                births += walk.up_steps;
                deaths += walk.steps - walk.up_steps;
                length += walk.steps;
                let strongest = max_born.max(tail_max);
                population.clear();
                let record = ExcursionRecord {
                    length,
                    births,
                    deaths,
                    strongest_fitness: strongest,
                };
                return Ok(ExcursionTrace {
                    record,
                    idle_steps,
                    max_born: strongest,
                    fast_forwarded: true,
                });
            }
        }

        work += 1;
        if work > WORK_LIMIT {
            return Err(GmsError::RuntimeLimit { limit: WORK_LIMIT });
        }
        length += 1;
        if step.sample(rng) {
            let f: f64 = rng.random();
            max_born = max_born.max(f);
            population.insert(f);
            births += 1;
        } else {
            let dead = population
                .pop_min()
                .expect("population is nonempty inside an excursion");
            deaths += 1;
            if population.is_empty() {
                let record = ExcursionRecord {
                    length,
                    births,
                    deaths,
                    strongest_fitness: dead,
                };
                return Ok(ExcursionTrace {
                    record,
                    idle_steps,
                    max_born,
                    fast_forwarded: false,
                });
            }
        }
    }
}

fn simulate_ordinal(config: &SimConfig, ordinal: u64, population: &mut Population) -> Result<ExcursionRecord> {
    let mut rng = excursion_rng(config.seed, ordinal);
    simulate_excursion(&config.params, config.fast_forward, population, &mut rng)
        .map(|trace| trace.record)
}

fn simulate_range(config: &SimConfig, start: u64, end: u64) -> Result<Vec<ExcursionRecord>> {
    if config.workers == 1 {
        let mut population = Population::new();
        return (start..end)
            .map(|j| simulate_ordinal(config, j, &mut population))
            .collect();
    }
    (start..end)
        .into_par_iter()
        .map_init(Population::new, |population, j| {
            simulate_ordinal(config, j, population)
        })
        .collect()
}

/// Ordinals simulated per batch in step-budget mode.
const STEP_MODE_BATCH: u64 = 4096;

/// Simulates the chain and returns its excursion records in ordinal order.
pub fn run_full_simulation(config: &SimConfig) -> Result<Vec<ExcursionRecord>> {
    config.validate()?;
    let run = || match config.target {
        SimTarget::Excursions(n) => simulate_range(config, 0, n),
        SimTarget::Steps(budget) => {
            let mut records = Vec::new();
            let mut spent = 0u64;
            let mut next = 0u64;
            loop {
                let batch = simulate_range(config, next, next + STEP_MODE_BATCH)?;
                next += STEP_MODE_BATCH;
                for record in batch {
                    if spent + record.length > budget {
                        return Ok(records);
                    }
                    spent += record.length;
                    records.push(record);
                }
            }
        }
    };
    if config.workers == 1 {
        return run();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| GmsError::Internal(format!("thread pool: {e}")))?;
    pool.install(run)
}

/// Strongest-fitness column of a record list.
pub fn strongest_fitnesses(records: &[ExcursionRecord]) -> Vec<f64> {
    records.iter().map(|r| r.strongest_fitness).collect()
}

/// One histogram of the per-excursion strongest fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessPanel {
    pub m: u32,
    pub excursions: usize,
    pub sample_mean: f64,
    pub standard_error: f64,
    pub analytic_mean: f64,
    pub histogram: Histogram,
}

/// Runs `n_steps` birth/death steps for every `m` and bins the strongest
/// fitnesses into `bins` equal-width bins on [0, 1].
pub fn fitness_panels(
    p: f64,
    m_values: &[u32],
    n_steps: u64,
    bins: usize,
    seed: u64,
) -> Result<Vec<FitnessPanel>> {
    if n_steps < 10_000 {
        return Err(GmsError::domain(format!(
            "n_steps must be at least 10000, got {n_steps}"
        )));
    }
    if bins == 0 {
        return Err(GmsError::domain("bins must be at least 1"));
    }
    m_values
        .iter()
        .map(|&m| {
            let params = ModelParams::new(p, m)?;
            let config = SimConfig::new(params, SimTarget::Steps(n_steps), seed);
            let records = run_full_simulation(&config)?;
            let dist = EmpiricalDistribution::new(strongest_fitnesses(&records))?;
            Ok(FitnessPanel {
                m,
                excursions: records.len(),
                sample_mean: dist.mean(),
                standard_error: dist.standard_error(),
                analytic_mean: mean(&params, &SeriesControl::default())?,
                histogram: histogram(&dist, bins, 0.0, 1.0)?,
            })
        })
        .collect()
}
