//! Exact treatment of the finite-population Markov chain: state enumeration,
//! the sparse transition matrix and its stationary distribution.

mod states;
mod stationary;
mod transition;

pub use states::{multiset_count, StateSpace, MAX_STATES};
pub use stationary::{
    gth, power_iteration, stationary_distribution, SolverMethod, SolverOptions,
    StationaryDistribution,
};
pub use transition::{imitation_probability, TransitionMatrix};

use crate::error::Result;
use crate::model::ModelSpec;

/// Everything produced by one exact solve.
#[derive(Debug, Clone)]
pub struct Solution {
    pub space: StateSpace,
    pub matrix: TransitionMatrix,
    pub stationary: StationaryDistribution,
}

/// Enumerates the states of `spec`, builds its transition matrix and solves
/// for the stationary distribution.
pub fn solve(spec: &ModelSpec, opts: &SolverOptions) -> Result<Solution> {
    let space = StateSpace::enumerate(spec.population(), spec.num_strategies())?;
    let matrix = TransitionMatrix::build(spec, &space)?;
    let stationary = stationary_distribution(&matrix, opts)?;
    Ok(Solution {
        space,
        matrix,
        stationary,
    })
}
