//! Evolutionary parameters, population states and the per-state payoff and
//! budget functions every downstream computation consumes.

use crate::error::{Error, Result};
use crate::game::{GameSpec, PdPayoffs};
use crate::incentive::IncentiveScheme;

/// Population size, mutation rate and intensity of selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    pub population: usize,
    pub mu: f64,
    pub beta: f64,
}

impl EvolutionParams {
    pub fn new(population: usize, mu: f64, beta: f64) -> Result<Self> {
        let p = Self {
            population,
            mu,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::InvalidParams(format!(
                "population size must be >= 2, got {}",
                self.population
            )));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::InvalidParams(format!(
                "mutation rate must lie in [0, 1], got {}",
                self.mu
            )));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "selection intensity must be >= 0, got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// Number of individuals playing each strategy.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PopulationState {
    counts: Vec<u32>,
}

impl PopulationState {
    /// Checked constructor: the counts must sum to `population`.
    pub fn new(counts: Vec<u32>, population: usize) -> Result<Self> {
        let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
        if total != population as u64 {
            return Err(Error::InvalidState(format!(
                "counts {counts:?} sum to {total}, expected {population}"
            )));
        }
        Ok(Self { counts })
    }

    pub(crate) fn from_counts_unchecked(counts: Vec<u32>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, i: usize) -> u32 {
        self.counts[i]
    }

    pub fn population(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    pub fn num_strategies(&self) -> usize {
        self.counts.len()
    }

    /// All `population` individuals play strategy `i`.
    pub fn homogeneous(num_strategies: usize, i: usize, population: usize) -> Self {
        let mut counts = vec![0; num_strategies];
        counts[i] = population as u32;
        Self { counts }
    }
}

/// A game, its evolutionary parameters and the incentive scheme in force.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    game: GameSpec,
    params: EvolutionParams,
    scheme: IncentiveScheme,
}

impl ModelSpec {
    pub fn new(game: GameSpec, params: EvolutionParams, scheme: IncentiveScheme) -> Result<Self> {
        params.validate()?;
        scheme.validate_for(&game)?;
        Ok(Self {
            game,
            params,
            scheme,
        })
    }

    /// Builds the game that matches `scheme` from the dilemma payoffs: the
    /// `(C, D)` dilemma for `None` and institutional schemes, the peer
    /// matrices otherwise.
    pub fn for_scheme(
        pd: &PdPayoffs,
        scheme: IncentiveScheme,
        params: EvolutionParams,
    ) -> Result<Self> {
        let game = match scheme {
            IncentiveScheme::PeerPunishment { epsilon, delta } => {
                GameSpec::peer_punishment(pd, epsilon, delta)?
            }
            IncentiveScheme::PeerReward { epsilon, delta } => {
                GameSpec::peer_reward(pd, epsilon, delta)?
            }
            _ => GameSpec::prisoners_dilemma(pd)?,
        };
        Self::new(game, params, scheme)
    }

    pub fn game(&self) -> &GameSpec {
        &self.game
    }

    pub fn params(&self) -> &EvolutionParams {
        &self.params
    }

    pub fn scheme(&self) -> &IncentiveScheme {
        &self.scheme
    }

    pub fn population(&self) -> usize {
        self.params.population
    }

    pub fn num_strategies(&self) -> usize {
        self.game.num_strategies()
    }

    /// Same model with `c` added to every payoff entry.
    pub fn with_shifted_payoffs(&self, c: f64) -> Self {
        Self {
            game: self.game.shifted(c),
            ..self.clone()
        }
    }

    pub fn with_params(&self, params: EvolutionParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            ..self.clone()
        })
    }

    fn check_state(&self, state: &PopulationState) -> Result<()> {
        if state.num_strategies() != self.num_strategies() {
            return Err(Error::InvalidState(format!(
                "state has {} strategies, game has {}",
                state.num_strategies(),
                self.num_strategies()
            )));
        }
        if state.population() != self.population() {
            return Err(Error::InvalidState(format!(
                "state holds {} individuals, population size is {}",
                state.population(),
                self.population()
            )));
        }
        Ok(())
    }

    /// Average payoff of one strategy-`i` individual against the other
    /// `N - 1` members of the population, including any institutional shift.
    pub fn effective_payoff(&self, state: &PopulationState, i: usize) -> Result<f64> {
        self.check_state(state)?;
        if i >= self.num_strategies() {
            return Err(Error::InvalidState(format!(
                "strategy index {i} out of range for {} strategies",
                self.num_strategies()
            )));
        }
        if state.count(i) == 0 {
            return Err(Error::EmptyCohort { strategy: i });
        }
        Ok(self.payoff_unchecked(state.counts(), i))
    }

    /// Effective payoff without validation. The value is only meaningful when
    /// `counts[i] >= 1`.
    #[inline]
    pub(crate) fn payoff_unchecked(&self, counts: &[u32], i: usize) -> f64 {
        let row = self.game.row(i);
        let mut total = -row[i];
        for (&n, &a) in counts.iter().zip(row) {
            total += f64::from(n) * a;
        }
        let mut payoff = total / (self.params.population - 1) as f64;
        match self.scheme {
            IncentiveScheme::InstitutionalReward { delta, .. } if i == COOPERATOR => {
                payoff += delta;
            }
            IncentiveScheme::InstitutionalPunishment { delta, .. } if i == DEFECTOR => {
                payoff -= delta;
            }
            _ => {}
        }
        payoff
    }

    /// Fills `out[i]` with the effective payoff of every strategy present in
    /// `counts`; entries for absent strategies are left at zero.
    #[inline]
    pub(crate) fn payoffs_into(&self, counts: &[u32], out: &mut [f64]) {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = if counts[i] > 0 {
                self.payoff_unchecked(counts, i)
            } else {
                0.0
            };
        }
    }

    /// Institutional outlay at this state: `n_C * delta / a` for reward,
    /// `n_D * delta / b` for punishment, zero otherwise.
    pub fn state_budget(&self, state: &PopulationState) -> Result<f64> {
        self.check_state(state)?;
        Ok(self.budget_unchecked(state.counts()))
    }

    #[inline]
    pub(crate) fn budget_unchecked(&self, counts: &[u32]) -> f64 {
        match self.scheme {
            IncentiveScheme::InstitutionalReward { delta, a } => {
                f64::from(counts[COOPERATOR]) * delta / a
            }
            IncentiveScheme::InstitutionalPunishment { delta, b } => {
                f64::from(counts[DEFECTOR]) * delta / b
            }
            _ => 0.0,
        }
    }

    /// Total population payoff `sum_i n_i * payoff_i` at this state.
    #[inline]
    pub(crate) fn welfare_unchecked(&self, counts: &[u32]) -> f64 {
        (0..counts.len())
            .filter(|&i| counts[i] > 0)
            .map(|i| f64::from(counts[i]) * self.payoff_unchecked(counts, i))
            .sum()
    }
}

// Institutional schemes are only valid on the (C, D) layout.
const COOPERATOR: usize = 0;
const DEFECTOR: usize = 1;
