//! Agent-based Monte Carlo of the mutation–imitation process.
//!
//! Each elementary step picks an individual A uniformly at random. With
//! probability `mu` A switches to a uniformly chosen different strategy;
//! otherwise a role model B is drawn uniformly from all `N` individuals (A
//! included, in which case nothing happens) and A adopts B's strategy with
//! the Fermi probability evaluated on the current effective payoffs.
//!
//! The random stream is Xoshiro256++ seeded through SplitMix64
//! (`SeedableRng::seed_from_u64`), so a given seed reproduces a trajectory
//! exactly. Independent replicates use [`replicate_seed`].

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::engine::imitation_probability;
use crate::error::{Error, Result};
use crate::model::{ModelSpec, PopulationState};

pub type SimRng = Xoshiro256PlusPlus;

/// Golden-ratio increment separating replicate seeds.
const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Minimum number of batches used for batch-means standard errors.
pub const MIN_BATCHES: usize = 20;

/// Seed of the `k`-th independent replicate derived from `seed`.
pub fn replicate_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_add(k.wrapping_mul(SEED_STRIDE))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub spec: ModelSpec,
    pub total_steps: u64,
    pub burn_in: u64,
    pub sample_stride: u64,
    pub seed: u64,
    pub batches: usize,
}

impl SimConfig {
    /// Defaults: burn-in of `1000 N` steps, one sample per generation (`N`
    /// steps), 20 batches.
    pub fn new(spec: ModelSpec, total_steps: u64, seed: u64) -> Self {
        let n = spec.population() as u64;
        Self {
            spec,
            total_steps,
            burn_in: n * 1000,
            sample_stride: n,
            seed,
            batches: MIN_BATCHES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.burn_in >= self.total_steps {
            return Err(Error::Configuration(format!(
                "burn-in ({}) must be shorter than the run ({} steps)",
                self.burn_in, self.total_steps
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::Configuration("sample stride must be >= 1".into()));
        }
        if self.batches < MIN_BATCHES {
            return Err(Error::Configuration(format!(
                "at least {MIN_BATCHES} batches are required, got {}",
                self.batches
            )));
        }
        if self.num_samples() < self.batches as u64 {
            return Err(Error::Configuration(format!(
                "run yields {} samples, fewer than the {} batches",
                self.num_samples(),
                self.batches
            )));
        }
        Ok(())
    }

    pub fn num_samples(&self) -> u64 {
        self.total_steps.saturating_sub(self.burn_in) / self.sample_stride.max(1)
    }

    /// Copy of this configuration for replicate `k`.
    pub fn replicate(&self, k: u64) -> Self {
        Self {
            seed: replicate_seed(self.seed, k),
            ..self.clone()
        }
    }
}

/// Time averages with batch-means standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimate {
    pub freq_estimates: Vec<f64>,
    pub freq_std_errors: Vec<f64>,
    pub coop_frequency: f64,
    pub coop_std_error: f64,
    pub welfare_estimate: f64,
    pub welfare_std_error: f64,
    pub cost_estimate: f64,
    pub cost_std_error: f64,
    pub samples: u64,
}

/// A single trajectory of the process.
pub struct Simulator<'a> {
    spec: &'a ModelSpec,
    counts: Vec<u32>,
    rng: SimRng,
}

impl<'a> Simulator<'a> {
    pub fn new(spec: &'a ModelSpec, initial: &PopulationState, seed: u64) -> Result<Self> {
        if initial.num_strategies() != spec.num_strategies()
            || initial.population() != spec.population()
        {
            return Err(Error::InvalidState(format!(
                "initial state {:?} does not fit N={}, m={}",
                initial.counts(),
                spec.population(),
                spec.num_strategies()
            )));
        }
        Ok(Self {
            spec,
            counts: initial.counts().to_vec(),
            rng: SimRng::seed_from_u64(seed),
        })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn state(&self) -> PopulationState {
        PopulationState::from_counts_unchecked(self.counts.clone())
    }

    /// Overwrites the current state without touching the random stream.
    pub fn reset_to(&mut self, state: &PopulationState) {
        self.counts.copy_from_slice(state.counts());
    }

    /// One elementary update. Returns `true` if the state changed.
    pub fn step(&mut self) -> bool {
        step_counts(&mut self.counts, self.spec, &mut self.rng)
    }
}

/// One elementary update applied to `state`, returning the successor.
pub fn step<R: Rng + ?Sized>(
    state: &PopulationState,
    spec: &ModelSpec,
    rng: &mut R,
) -> PopulationState {
    let mut counts = state.counts().to_vec();
    step_counts(&mut counts, spec, rng);
    PopulationState::from_counts_unchecked(counts)
}

fn pick_strategy<R: Rng + ?Sized>(counts: &[u32], population: u32, rng: &mut R) -> usize {
    let mut u = rng.random_range(0..population);
    for (i, &c) in counts.iter().enumerate() {
        if u < c {
            return i;
        }
        u -= c;
    }
    unreachable!("counts sum to the population size")
}

fn step_counts<R: Rng + ?Sized>(counts: &mut [u32], spec: &ModelSpec, rng: &mut R) -> bool {
    let m = counts.len();
    let population = spec.population() as u32;
    let params = spec.params();
    let a = pick_strategy(counts, population, rng);

    let target = if rng.random::<f64>() < params.mu {
        let r = rng.random_range(0..m - 1);
        if r >= a {
            r + 1
        } else {
            r
        }
    } else {
        let b = pick_strategy(counts, population, rng);
        if b == a {
            return false;
        }
        let f_a = spec.payoff_unchecked(counts, a);
        let f_b = spec.payoff_unchecked(counts, b);
        if rng.random::<f64>() >= imitation_probability(f_a, f_b, params.beta) {
            return false;
        }
        b
    };
    counts[a] -= 1;
    counts[target] += 1;
    true
}

struct Accumulator {
    batch_sums: Vec<f64>,
    total: f64,
}

impl Accumulator {
    fn new(batches: usize) -> Self {
        Self {
            batch_sums: vec![0.0; batches],
            total: 0.0,
        }
    }

    fn add(&mut self, batch: usize, v: f64) {
        self.batch_sums[batch] += v;
        self.total += v;
    }

    /// (mean, standard error of the mean) from equal-sized batches.
    fn finish(&self, batch_len: u64) -> (f64, f64) {
        let b = self.batch_sums.len() as f64;
        let n = batch_len as f64;
        let mean = self.total / (b * n);
        let means = self.batch_sums.iter().map(|s| s / n);
        let var = means.map(|x| (x - mean).powi(2)).sum::<f64>() / (b - 1.0);
        (mean, (var / b).sqrt())
    }
}

/// Runs one trajectory and returns time-averaged frequencies, welfare and
/// cost (all per capita) with batch-means standard errors.
///
/// The run starts from the most even split of the population across
/// strategies. Samples are taken every `sample_stride` steps after the
/// burn-in; trailing samples that do not fill a whole batch are discarded.
pub fn run(config: &SimConfig) -> Result<SimEstimate> {
    config.validate()?;
    let spec = &config.spec;
    let m = spec.num_strategies();
    let n = spec.population();
    let pop = n as f64;

    let mut initial = vec![(n / m) as u32; m];
    for c in initial.iter_mut().take(n % m) {
        *c += 1;
    }
    let initial = PopulationState::new(initial, n)?;
    let mut sim = Simulator::new(spec, &initial, config.seed)?;

    let batches = config.batches;
    let batch_len = config.num_samples() / batches as u64;
    let used = batch_len * batches as u64;

    let cooperative: Vec<bool> = (0..m).map(|i| spec.game().is_cooperative(i)).collect();
    let mut freq_acc: Vec<Accumulator> = (0..m).map(|_| Accumulator::new(batches)).collect();
    let mut coop_acc = Accumulator::new(batches);
    let mut welfare_acc = Accumulator::new(batches);
    let mut cost_acc = Accumulator::new(batches);

    for _ in 0..config.burn_in {
        sim.step();
    }
    for sample in 0..used {
        for _ in 0..config.sample_stride {
            sim.step();
        }
        let batch = (sample / batch_len) as usize;
        let counts = sim.counts();
        let mut coop = 0.0;
        for (i, acc) in freq_acc.iter_mut().enumerate() {
            let f = f64::from(counts[i]) / pop;
            acc.add(batch, f);
            if cooperative[i] {
                coop += f;
            }
        }
        coop_acc.add(batch, coop);
        welfare_acc.add(batch, spec.welfare_unchecked(counts) / pop);
        cost_acc.add(batch, spec.budget_unchecked(counts) / pop);
    }

    let (freq_estimates, freq_std_errors) = freq_acc.iter().map(|a| a.finish(batch_len)).unzip();
    let (coop_frequency, coop_std_error) = coop_acc.finish(batch_len);
    let (welfare_estimate, welfare_std_error) = welfare_acc.finish(batch_len);
    let (cost_estimate, cost_std_error) = cost_acc.finish(batch_len);
    Ok(SimEstimate {
        freq_estimates,
        freq_std_errors,
        coop_frequency,
        coop_std_error,
        welfare_estimate,
        welfare_std_error,
        cost_estimate,
        cost_std_error,
        samples: used,
    })
}
