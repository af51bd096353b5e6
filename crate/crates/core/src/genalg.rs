//! Decoder-in-the-loop information-set search.
//!
//! Each candidate information set is judged by the thing that matters:
//! the measured error rate of flooding sum-product decoding on the
//! pruned graph built from it, at the design SNR. Fitness evaluations
//! share one fixed set of per-frame random streams (common random
//! numbers), so comparisons between individuals are not washed out by
//! independent Monte-Carlo noise and results do not depend on
//! evaluation order or worker count.

use crate::channel::{domain, sigma_from_ebn0, substream, transmit};
use crate::decode::{DecoderConfig, SpaEngine};
use crate::par;
use crate::polar::{construct_5g, construct_bhattacharyya, PolarCode, PolarError};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenAlgError {
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Polar(#[from] PolarError),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which measured error rate drives selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CostMetric {
    Ber,
    Bler,
}

impl std::str::FromStr for CostMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ber" => Ok(CostMetric::Ber),
            "bler" => Ok(CostMetric::Bler),
            other => Err(format!("unknown cost {other:?} (expected ber|bler)")),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenAlgConfig {
    pub population_size: usize,
    pub elite_count: usize,
    pub generations: usize,
    /// Poisson rate of extra frozen↔info swaps per child (one swap
    /// always happens).
    pub mutation_swaps: f64,
    /// Design SNR (Eb/N0, dB) the fitness channel runs at.
    pub snr_des_db: f64,
    pub cost: CostMetric,
    pub frames_per_eval: u64,
    pub seed: u64,
    /// Decoder iteration budget for fitness evaluation.
    pub max_iters: usize,
    /// Write a resumable checkpoint every this many generations.
    pub checkpoint_every: usize,
}

impl Default for GenAlgConfig {
    fn default() -> Self {
        GenAlgConfig {
            population_size: 20,
            elite_count: 2,
            generations: 200,
            mutation_swaps: 1.0,
            snr_des_db: 3.0,
            cost: CostMetric::Bler,
            frames_per_eval: 20_000,
            seed: 0,
            max_iters: 200,
            checkpoint_every: 10,
        }
    }
}

impl GenAlgConfig {
    pub fn validate(&self) -> Result<(), GenAlgError> {
        if self.population_size < 2 {
            return Err(GenAlgError::BadConfig("population_size must be ≥ 2".into()));
        }
        if self.elite_count >= self.population_size {
            return Err(GenAlgError::BadConfig(
                "elite_count must be smaller than population_size".into(),
            ));
        }
        if self.frames_per_eval < 1000 {
            return Err(GenAlgError::BadConfig("frames_per_eval must be ≥ 1000".into()));
        }
        Ok(())
    }
}

/// An information set with its measured fitness.
#[derive(Debug, Clone)]
pub struct Individual {
    pub code: PolarCode,
    /// Measured error rate at the design SNR; lower is better.
    pub fitness: f64,
    pub eval_frames: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
}

#[derive(Debug)]
pub struct GenAlgOutcome {
    pub best: Individual,
    pub history: Vec<GenerationStats>,
    pub final_population: Vec<Individual>,
}

/// Seed population: the 5G and Bhattacharyya constructions plus random
/// swap perturbations of them, duplicates refilled.
pub fn init_population(
    block_len: usize,
    info_len: usize,
    config: &GenAlgConfig,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<PolarCode>, GenAlgError> {
    config.validate()?;
    let mut seeds: Vec<PolarCode> = Vec::new();
    // the 5G sequence covers N in 32..=1024; below that fall back to a
    // second erasure-probability design point
    match construct_5g(block_len, info_len) {
        Ok(code) => seeds.push(code),
        Err(_) => seeds.push(construct_bhattacharyya(block_len, info_len, 0.3)?),
    }
    seeds.push(construct_bhattacharyya(block_len, info_len, 0.5)?);

    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut population = Vec::with_capacity(config.population_size);
    for code in seeds {
        if population.len() == config.population_size {
            break;
        }
        if seen.insert(code.info_set().to_vec()) {
            population.push(code);
        }
    }
    let mut attempts = 0usize;
    while population.len() < config.population_size {
        let base = &population[attempts % population.len().max(1)];
        let cand = mutate(base, rng, config);
        attempts += 1;
        if seen.insert(cand.info_set().to_vec()) || attempts > 64 * config.population_size {
            population.push(cand);
        }
    }
    Ok(population)
}

/// Swap a uniformly chosen information index with a uniformly chosen
/// frozen index, `Poisson(mutation_swaps) + 1` times. Identity for
/// full-rate codes.
pub fn mutate(code: &PolarCode, rng: &mut ChaCha12Rng, config: &GenAlgConfig) -> PolarCode {
    let frozen = code.frozen_set();
    if frozen.is_empty() {
        return code.clone();
    }
    let extra = if config.mutation_swaps > 0.0 {
        Poisson::new(config.mutation_swaps).expect("positive rate").sample(rng) as usize
    } else {
        0
    };
    let mut info: BTreeSet<usize> = code.info_set().iter().copied().collect();
    let mut froz: BTreeSet<usize> = frozen.iter().copied().collect();
    for _ in 0..extra + 1 {
        let i = *info.iter().nth(rng.gen_range(0..info.len())).expect("nonempty");
        let f = *froz.iter().nth(rng.gen_range(0..froz.len())).expect("nonempty");
        info.remove(&i);
        froz.remove(&f);
        info.insert(f);
        froz.insert(i);
    }
    let set: Vec<usize> = info.into_iter().collect();
    PolarCode::new(code.block_len(), &set).expect("swap preserves cardinality and range")
}

/// Child = intersection of the parents, filled back to size K by
/// sampling the symmetric difference without replacement.
pub fn crossover(a: &PolarCode, b: &PolarCode, rng: &mut ChaCha12Rng) -> PolarCode {
    let sa: BTreeSet<usize> = a.info_set().iter().copied().collect();
    let sb: BTreeSet<usize> = b.info_set().iter().copied().collect();
    let mut child: BTreeSet<usize> = sa.intersection(&sb).copied().collect();
    let mut pool: Vec<usize> = sa.symmetric_difference(&sb).copied().collect();
    while child.len() < a.info_len() {
        let pick = rng.gen_range(0..pool.len());
        child.insert(pool.swap_remove(pick));
    }
    let set: Vec<usize> = child.into_iter().collect();
    PolarCode::new(a.block_len(), &set).expect("repair keeps cardinality")
}

/// Fitness: error rate of flooding SPA on the pruned graph of `code`
/// over `frames_per_eval` frames at the design SNR, with per-frame
/// streams keyed only by `(seed, frame)` — identical for every
/// individual (common random numbers). Bit errors are counted on the
/// codeword estimate (the decoder's native output), so a rate-1 code
/// measures the raw channel error rate; block errors are equivalent
/// either way since the transform is invertible.
pub fn fitness(code: &PolarCode, config: &GenAlgConfig) -> f64 {
    let graph = crate::tanner::prune(&crate::tanner::full_bipartite(code));
    let engine = SpaEngine::new(&graph);
    let dcfg = DecoderConfig { max_iters: config.max_iters, ..Default::default() };
    let sigma = sigma_from_ebn0(config.snr_des_db, code.rate());
    let frames = config.frames_per_eval as usize;
    let outcomes = par::map_indexed(frames, |frame| {
        let mut rng = substream(config.seed, &[domain::FITNESS, frame as u64]);
        let info: Vec<u8> = (0..code.info_len()).map(|_| rng.gen::<bool>() as u8).collect();
        let cw = code.encode(&info).expect("length matches");
        let llr = transmit(&cw, sigma, &mut rng);
        let out = engine.decode_spa(Some(code), &llr, &dcfg).expect("validated");
        let errs = out.codeword_est.iter().zip(&cw).filter(|(x, y)| x != y).count() as u64;
        (errs, (errs > 0) as u64)
    });
    let (bit_errors, block_errors) = outcomes
        .iter()
        .fold((0u64, 0u64), |(b, f), &(eb, ef)| (b + eb, f + ef));
    match config.cost {
        CostMetric::Ber => {
            bit_errors as f64 / (config.frames_per_eval * code.block_len() as u64) as f64
        }
        CostMetric::Bler => block_errors as f64 / config.frames_per_eval as f64,
    }
}

/// Resumable evolution state.
#[derive(Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub block_len: usize,
    pub generation: usize,
    /// 0-based information sets with their cached fitness.
    pub population: Vec<(Vec<usize>, f64)>,
    pub history: Vec<GenerationStats>,
    /// Word position of the evolution RNG, so the continuation consumes
    /// the stream exactly where the checkpointed run left it.
    pub rng_word_pos: u128,
}

/// Hook invoked after each evaluated generation (history row plus a
/// checkpoint when due).
pub type ProgressFn<'a> = dyn FnMut(&GenerationStats, Option<&Checkpoint>) + 'a;

pub fn evolve(
    block_len: usize,
    info_len: usize,
    config: &GenAlgConfig,
) -> Result<GenAlgOutcome, GenAlgError> {
    evolve_with_progress(block_len, info_len, config, None, &mut |_, _| {})
}

/// Full-control entry point: optional resume checkpoint and a progress
/// callback for streaming history/checkpoints to disk.
pub fn evolve_with_progress(
    block_len: usize,
    info_len: usize,
    config: &GenAlgConfig,
    resume: Option<&Checkpoint>,
    progress: &mut ProgressFn<'_>,
) -> Result<GenAlgOutcome, GenAlgError> {
    config.validate()?;
    let mut rng = substream(config.seed, &[domain::EVOLVE]);
    let mut cache: BTreeMap<Vec<usize>, f64> = BTreeMap::new();

    let (start_gen, mut population, mut history) = match resume {
        Some(cp) => {
            if cp.block_len != block_len {
                return Err(GenAlgError::Checkpoint(format!(
                    "checkpoint is for N={}, requested N={block_len}",
                    cp.block_len
                )));
            }
            let mut pop = Vec::with_capacity(cp.population.len());
            for (set, fit) in &cp.population {
                cache.insert(set.clone(), *fit);
                pop.push(PolarCode::new(block_len, set)?);
            }
            rng.set_word_pos(cp.rng_word_pos);
            (cp.generation + 1, pop, cp.history.clone())
        }
        None => {
            let pop = init_population(block_len, info_len, config, &mut rng)?;
            (1, pop, Vec::new())
        }
    };

    // generation 0 = evaluated seeds
    if resume.is_none() {
        let stats = evaluate(&mut population, config, &mut cache);
        history.push(GenerationStats { generation: 0, ..stats });
        let cp = make_checkpoint(block_len, 0, &population, &cache, &history, &rng);
        progress(history.last().expect("just pushed"), Some(&cp));
    }

    let mut ranked = rank(&population, &cache);
    for generation in start_gen..=config.generations {
        let mut next: Vec<PolarCode> = ranked
            .iter()
            .take(config.elite_count)
            .map(|i| population[*i].clone())
            .collect();
        while next.len() < config.population_size {
            let pa = tournament(&ranked, &mut rng);
            let pb = tournament(&ranked, &mut rng);
            let child = crossover(&population[pa], &population[pb], &mut rng);
            next.push(mutate(&child, &mut rng, config));
        }
        population = next;
        let stats = evaluate(&mut population, config, &mut cache);
        history.push(GenerationStats { generation, ..stats });
        ranked = rank(&population, &cache);
        let due = generation % config.checkpoint_every.max(1) == 0
            || generation == config.generations;
        let cp = due.then(|| {
            make_checkpoint(block_len, generation, &population, &cache, &history, &rng)
        });
        progress(history.last().expect("just pushed"), cp.as_ref());
    }

    let ranked = rank(&population, &cache);
    let final_population: Vec<Individual> = ranked
        .iter()
        .map(|&i| Individual {
            code: population[i].clone(),
            fitness: cache[population[i].info_set()],
            eval_frames: config.frames_per_eval,
        })
        .collect();
    Ok(GenAlgOutcome {
        best: final_population[0].clone(),
        history,
        final_population,
    })
}

/// Evaluate any uncached individuals (in parallel, order-independent)
/// and return the generation's best/mean.
fn evaluate(
    population: &mut [PolarCode],
    config: &GenAlgConfig,
    cache: &mut BTreeMap<Vec<usize>, f64>,
) -> GenerationStats {
    let todo: Vec<PolarCode> = {
        let mut seen = BTreeSet::new();
        population
            .iter()
            .filter(|c| !cache.contains_key(c.info_set()) && seen.insert(c.info_set().to_vec()))
            .cloned()
            .collect()
    };
    let results = par::map_indexed(todo.len(), |i| fitness(&todo[i], config));
    for (code, fit) in todo.iter().zip(results) {
        cache.insert(code.info_set().to_vec(), fit);
    }
    let fits: Vec<f64> = population.iter().map(|c| cache[c.info_set()]).collect();
    let best = fits.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = fits.iter().sum::<f64>() / fits.len() as f64;
    GenerationStats { generation: 0, best_fitness: best, mean_fitness: mean }
}

/// Indices of the population sorted by (fitness, info set) ascending.
fn rank(population: &[PolarCode], cache: &BTreeMap<Vec<usize>, f64>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..population.len()).collect();
    idx.sort_by(|&a, &b| {
        let fa = cache[population[a].info_set()];
        let fb = cache[population[b].info_set()];
        fa.partial_cmp(&fb)
            .expect("fitness is finite")
            .then_with(|| population[a].info_set().cmp(population[b].info_set()))
    });
    idx
}

/// Size-2 tournament over rank indices: pick two, keep the better
/// (lower rank position).
fn tournament(ranked: &[usize], rng: &mut ChaCha12Rng) -> usize {
    let a = rng.gen_range(0..ranked.len());
    let b = rng.gen_range(0..ranked.len());
    ranked[a.min(b)]
}

fn make_checkpoint(
    block_len: usize,
    generation: usize,
    population: &[PolarCode],
    cache: &BTreeMap<Vec<usize>, f64>,
    history: &[GenerationStats],
    rng: &ChaCha12Rng,
) -> Checkpoint {
    Checkpoint {
        block_len,
        generation,
        population: population
            .iter()
            .map(|c| (c.info_set().to_vec(), cache[c.info_set()]))
            .collect(),
        history: history.to_vec(),
        rng_word_pos: rng.get_word_pos(),
    }
}

/// `generation,best_fitness,mean_fitness` rows.
pub fn history_csv(history: &[GenerationStats]) -> String {
    let mut out = String::from("generation,best_fitness,mean_fitness\n");
    for h in history {
        out.push_str(&format!(
            "{},{:.6e},{:.6e}\n",
            h.generation, h.best_fitness, h.mean_fitness
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_config() -> GenAlgConfig {
        GenAlgConfig {
            population_size: 6,
            elite_count: 1,
            generations: 3,
            frames_per_eval: 1000,
            max_iters: 30,
            seed: 11,
            snr_des_db: 3.0,
            ..Default::default()
        }
    }

    #[test]
    fn init_population_two_is_exactly_the_seeds() {
        let config = GenAlgConfig { population_size: 2, elite_count: 1, ..quick_config() };
        let mut rng = substream(1, &[domain::EVOLVE]);
        let pop = init_population(32, 16, &config, &mut rng).unwrap();
        assert_eq!(pop.len(), 2);
        let five_g = construct_5g(32, 16).unwrap();
        let bhatta = construct_bhattacharyya(32, 16, 0.5).unwrap();
        assert_eq!(pop[0].info_set(), five_g.info_set());
        assert_eq!(pop[1].info_set(), bhatta.info_set());
    }

    #[test]
    fn init_population_unique_and_sized() {
        let config = GenAlgConfig { population_size: 12, ..quick_config() };
        let mut rng = substream(3, &[domain::EVOLVE]);
        let pop = init_population(32, 16, &config, &mut rng).unwrap();
        assert_eq!(pop.len(), 12);
        let sets: BTreeSet<Vec<usize>> = pop.iter().map(|c| c.info_set().to_vec()).collect();
        assert_eq!(sets.len(), 12, "duplicates must be refilled");
        assert!(pop.iter().all(|c| c.info_len() == 16));
    }

    #[test]
    fn mutate_full_rate_is_identity() {
        let code = PolarCode::new(8, &[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        let mut rng = substream(5, &[domain::EVOLVE]);
        let out = mutate(&code, &mut rng, &quick_config());
        assert_eq!(out.info_set(), code.info_set());
    }

    #[test]
    fn single_swap_moves_exactly_one_index() {
        let code = construct_bhattacharyya(8, 4, 0.5).unwrap();
        let config = GenAlgConfig { mutation_swaps: 0.0, ..quick_config() };
        let mut rng = substream(5, &[domain::EVOLVE]);
        for _ in 0..50 {
            let out = mutate(&code, &mut rng, &config);
            assert_eq!(out.info_len(), 4);
            let a: BTreeSet<usize> = code.info_set().iter().copied().collect();
            let b: BTreeSet<usize> = out.info_set().iter().copied().collect();
            assert_eq!(a.symmetric_difference(&b).count(), 2);
        }
    }

    #[test]
    fn repeated_mutation_reaches_every_info_set() {
        // irreducibility on P(8,4): all C(8,4)=70 sets show up in a chain
        let config = quick_config();
        let mut rng = substream(17, &[domain::EVOLVE]);
        let mut current = construct_bhattacharyya(8, 4, 0.5).unwrap();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        for _ in 0..20_000 {
            seen.insert(current.info_set().to_vec());
            current = mutate(&current, &mut rng, &config);
        }
        assert_eq!(seen.len(), 70, "mutation chain must cover all info sets");
    }

    #[test]
    fn crossover_identity_and_bounds() {
        let mut rng = substream(9, &[domain::EVOLVE]);
        let a = construct_bhattacharyya(16, 8, 0.5).unwrap();
        let child = crossover(&a, &a, &mut rng);
        assert_eq!(child.info_set(), a.info_set());

        let b = construct_5g(32, 12).unwrap();
        let c = construct_bhattacharyya(32, 12, 0.5).unwrap();
        for _ in 0..20 {
            let child = crossover(&b, &c, &mut rng);
            assert_eq!(child.info_len(), 12);
            let union: BTreeSet<usize> = b
                .info_set()
                .iter()
                .chain(c.info_set())
                .copied()
                .collect();
            assert!(child.info_set().iter().all(|i| union.contains(i)));
        }
    }

    #[test]
    fn fitness_of_rate_one_matches_channel_ber() {
        // a rate-1 code has no checks: SPA fitness is the raw channel
        // bit error rate Q(1/σ)
        let code = PolarCode::new(16, &(0..16).collect::<Vec<_>>()).unwrap();
        let config = GenAlgConfig {
            cost: CostMetric::Ber,
            frames_per_eval: 20_000,
            ..quick_config()
        };
        let sigma = sigma_from_ebn0(config.snr_des_db, 1.0);
        let expect = crate::channel::q_function(1.0 / sigma);
        let got = fitness(&code, &config);
        let std = (expect * (1.0 - expect) / (config.frames_per_eval as f64 * 16.0)).sqrt();
        assert!((got - expect).abs() < 4.0 * std, "got {got}, expected {expect} ± {std}");
    }

    #[test]
    fn fitness_is_reproducible() {
        let code = construct_bhattacharyya(16, 8, 0.5).unwrap();
        let config = quick_config();
        assert_eq!(fitness(&code, &config), fitness(&code, &config));
    }

    #[test]
    fn zero_generations_returns_best_seed() {
        let config = GenAlgConfig { generations: 0, ..quick_config() };
        let out = evolve(16, 8, &config).unwrap();
        assert_eq!(out.history.len(), 1);
        assert_eq!(out.history[0].generation, 0);
        assert!((out.best.fitness - out.history[0].best_fitness).abs() < 1e-15);
    }

    #[test]
    fn elitism_makes_best_fitness_monotone() {
        let out = evolve(16, 8, &quick_config()).unwrap();
        assert_eq!(out.history.len(), 4);
        for w in out.history.windows(2) {
            assert!(
                w[1].best_fitness <= w[0].best_fitness + 1e-15,
                "best fitness rose: {w:?}"
            );
        }
    }

    #[test]
    fn evolution_is_deterministic() {
        let config = quick_config();
        let a = evolve(16, 8, &config).unwrap();
        let b = evolve(16, 8, &config).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.best.code.info_set(), b.best.code.info_set());
    }

    #[test]
    fn resume_reproduces_identical_continuation() {
        let config = GenAlgConfig { generations: 4, checkpoint_every: 2, ..quick_config() };
        let mut checkpoints: Vec<Checkpoint> = Vec::new();
        let full = evolve_with_progress(16, 8, &config, None, &mut |_, cp| {
            if let Some(cp) = cp {
                checkpoints.push(Checkpoint {
                    block_len: cp.block_len,
                    generation: cp.generation,
                    population: cp.population.clone(),
                    history: cp.history.clone(),
                    rng_word_pos: cp.rng_word_pos,
                });
            }
        })
        .unwrap();
        let mid = checkpoints.iter().find(|c| c.generation == 2).expect("checkpoint at gen 2");
        let resumed = evolve_with_progress(16, 8, &config, Some(mid), &mut |_, _| {}).unwrap();
        assert_eq!(resumed.history, full.history);
        assert_eq!(resumed.best.code.info_set(), full.best.code.info_set());
    }

    #[test]
    fn config_validation() {
        let mut c = quick_config();
        c.population_size = 1;
        assert!(c.validate().is_err());
        let mut c = quick_config();
        c.elite_count = 6;
        assert!(c.validate().is_err());
        let mut c = quick_config();
        c.frames_per_eval = 10;
        assert!(c.validate().is_err());
    }

    #[test]
    fn history_csv_format() {
        let rows = vec![
            GenerationStats { generation: 0, best_fitness: 0.5, mean_fitness: 0.75 },
            GenerationStats { generation: 1, best_fitness: 0.25, mean_fitness: 0.5 },
        ];
        let csv = history_csv(&rows);
        assert!(csv.starts_with("generation,best_fitness,mean_fitness\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
