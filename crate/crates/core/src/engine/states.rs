//! Enumeration of the population simplex `{n : sum n_i = N}`.
//!
//! States are stored in colexicographic order of their count vectors: the last
//! strategy's count is the most significant key, the first strategy's the
//! least. Ranking uses the combinatorial number system, so the reverse map
//! needs no hash table.

use crate::error::{Error, Result};
use crate::model::PopulationState;

/// Largest state space we are willing to materialise.
pub const MAX_STATES: usize = 20_000_000;

#[derive(Debug, Clone)]
pub struct StateSpace {
    population: usize,
    strategies: usize,
    counts: Vec<u32>,
    // binom[k][r] = C(k, r) for the ranks actually needed
    binom: Vec<Vec<usize>>,
}

impl StateSpace {
    pub fn enumerate(population: usize, strategies: usize) -> Result<Self> {
        if population < 2 || strategies < 2 {
            return Err(Error::Configuration(format!(
                "state space needs N >= 2 and m >= 2, got N={population}, m={strategies}"
            )));
        }
        let capacity_error = || Error::Capacity {
            population,
            strategies,
            limit: MAX_STATES,
        };
        if population > u32::MAX as usize {
            return Err(capacity_error());
        }
        let size = multiset_count(population, strategies)
            .filter(|&s| s <= MAX_STATES)
            .ok_or_else(capacity_error)?;

        // Pascal's triangle up to N + m - 1; every entry used is <= size.
        let rows = population + strategies;
        let mut binom = vec![vec![0usize; strategies]; rows];
        for row in binom.iter_mut() {
            row[0] = 1;
        }
        for k in 1..rows {
            for r in 1..strategies {
                binom[k][r] = binom[k - 1][r - 1].saturating_add(binom[k - 1][r]);
            }
        }

        let mut counts = Vec::with_capacity(size * strategies);
        let mut current = vec![0u32; strategies];
        fill_colex(strategies, population as u32, &mut current, &mut counts);
        debug_assert_eq!(counts.len(), size * strategies);

        Ok(Self {
            population,
            strategies,
            counts,
            binom,
        })
    }

    pub fn len(&self) -> usize {
        self.counts.len() / self.strategies
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn population(&self) -> usize {
        self.population
    }

    pub fn num_strategies(&self) -> usize {
        self.strategies
    }

    /// Count vector of the `k`-th state.
    #[inline]
    pub fn counts(&self, k: usize) -> &[u32] {
        &self.counts[k * self.strategies..(k + 1) * self.strategies]
    }

    pub fn state(&self, k: usize) -> PopulationState {
        PopulationState::from_counts_unchecked(self.counts(k).to_vec())
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.counts.chunks_exact(self.strategies)
    }

    /// Ordinal of a count vector, or `None` if it is not a member of the
    /// simplex.
    pub fn index_of(&self, counts: &[u32]) -> Option<usize> {
        if counts.len() != self.strategies
            || counts.iter().map(|&c| c as usize).sum::<usize>() != self.population
        {
            return None;
        }
        Some(self.rank(counts))
    }

    pub fn index(&self, state: &PopulationState) -> Option<usize> {
        self.index_of(state.counts())
    }

    /// Colex rank of a valid composition.
    #[inline]
    pub(crate) fn rank(&self, counts: &[u32]) -> usize {
        // Walking from the most significant (last) coordinate down: with
        // `remaining` individuals left for the first `parts` strategies, every
        // smaller value v of the current coordinate skips C(remaining - v + parts - 2, parts - 2)
        // states. The sum over v telescopes to a difference of two binomials.
        let mut remaining = self.population;
        let mut rank = 0;
        for parts in (2..=self.strategies).rev() {
            let v = counts[parts - 1] as usize;
            if v > 0 {
                // sum_{u=0}^{v-1} C(remaining - u + parts - 2, parts - 2)
                //   = C(remaining + parts - 1, parts - 1) - C(remaining - v + parts - 1, parts - 1)
                rank += self.binom[remaining + parts - 1][parts - 1]
                    - self.binom[remaining - v + parts - 1][parts - 1];
            }
            remaining -= v;
        }
        rank
    }
}

/// `C(N + m - 1, m - 1)`, or `None` on overflow.
pub fn multiset_count(population: usize, strategies: usize) -> Option<usize> {
    let k = strategies.checked_sub(1)?;
    let n = population.checked_add(k)?;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    usize::try_from(acc).ok()
}

fn fill_colex(parts: usize, total: u32, current: &mut [u32], out: &mut Vec<u32>) {
    if parts == 1 {
        current[0] = total;
        out.extend_from_slice(current);
        return;
    }
    for last in 0..=total {
        current[parts - 1] = last;
        fill_colex(parts - 1, total - last, current, out);
    }
    current[parts - 1] = 0;
}
