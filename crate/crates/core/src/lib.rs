//! Finite-population evolutionary dynamics of the one-shot Prisoner's
//! Dilemma under peer and institutional incentives.
//!
//! The crate computes, for a well-mixed population of `N` players updating
//! by mutation and Fermi-rule imitation, the exact stationary distribution of
//! the population-state Markov chain and from it the long-run cooperation
//! frequency, per-capita social welfare and per-capita institutional
//! incentive cost. An agent-based simulator of the same process serves as an
//! independent check.
//!
//! ```
//! use welfare_core::{engine, metrics, EvolutionParams, IncentiveScheme, ModelSpec, PdPayoffs};
//!
//! let params = EvolutionParams::new(20, 0.01, 0.1).unwrap();
//! let scheme = IncentiveScheme::InstitutionalReward { delta: 1.0, a: 1.0 };
//! let spec = ModelSpec::for_scheme(&PdPayoffs::standard(), scheme, params).unwrap();
//! let sol = engine::solve(&spec, &engine::SolverOptions::default()).unwrap();
//! let report = metrics::welfare_report(&spec, &sol.space, &sol.stationary).unwrap();
//! assert!(report.coop_frequency > 0.0 && report.coop_frequency < 1.0);
//! ```

pub mod engine;
pub mod error;
pub mod game;
pub mod incentive;
pub mod metrics;
pub mod model;
pub mod simulate;

pub use error::{Error, Result};
pub use game::{GameSpec, PdPayoffs};
pub use incentive::IncentiveScheme;
pub use metrics::{CoopCounting, WelfareReport};
pub use model::{EvolutionParams, ModelSpec, PopulationState};
