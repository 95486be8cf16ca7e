use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid evolution parameters: {0}")]
    InvalidParams(String),

    #[error("invalid incentive scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid population state: {0}")]
    InvalidState(String),

    /// Payoff requested for a strategy nobody currently plays.
    #[error("no individual plays strategy {strategy} in this state")]
    EmptyCohort { strategy: usize },

    #[error("state space for N={population}, m={strategies} exceeds capacity ({limit} states)")]
    Capacity {
        population: usize,
        strategies: usize,
        limit: usize,
    },

    #[error("configuration mismatch: {0}")]
    Configuration(String),

    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NotConverged { iterations: usize, residual: f64 },

    /// The chain was generated with zero mutation and may be reducible.
    #[error("transition matrix was built with mu = 0; the chain is not ergodic and the stationary distribution is not unique")]
    NotErgodic,

    #[error("chain is reducible: state {state} cannot reach lower-indexed states")]
    Reducible { state: usize },
}
