//! Long-run functionals of a stationary distribution: strategy frequencies,
//! social welfare and the institution's expected incentive outlay.
//!
//! Welfare and cost are both reported per capita (divided by `N`) so that the
//! net figure `gross - cost` compares like with like.

use crate::engine::{StateSpace, StationaryDistribution};
use crate::error::{Error, Result};
use crate::model::{ModelSpec, PopulationState};

/// Which strategies count towards the cooperation frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoopCounting {
    /// Every strategy that plays C in the dilemma, including peer punishers
    /// and rewarders.
    #[default]
    AllCooperative,
    /// Only the unconditional cooperator `C`.
    PureCooperators,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelfareReport {
    pub coop_frequency: f64,
    pub gross_welfare_per_capita: f64,
    pub incentive_cost_per_capita: f64,
    pub net_welfare_per_capita: f64,
}

impl WelfareReport {
    pub fn new(coop_frequency: f64, gross: f64, cost: f64) -> Self {
        Self {
            coop_frequency,
            gross_welfare_per_capita: gross,
            incentive_cost_per_capita: cost,
            net_welfare_per_capita: gross - cost,
        }
    }
}

fn check_consistent(
    spec: &ModelSpec,
    space: &StateSpace,
    pi: &StationaryDistribution,
) -> Result<()> {
    if space.population() != spec.population() || space.num_strategies() != spec.num_strategies() {
        return Err(Error::Configuration(format!(
            "model has N={}, m={} but state space has N={}, m={}",
            spec.population(),
            spec.num_strategies(),
            space.population(),
            space.num_strategies()
        )));
    }
    check_len(space, pi)
}

fn check_len(space: &StateSpace, pi: &StationaryDistribution) -> Result<()> {
    if pi.len() != space.len() {
        return Err(Error::Configuration(format!(
            "distribution has {} entries, state space has {}",
            pi.len(),
            space.len()
        )));
    }
    Ok(())
}

/// Long-run frequency of strategy `i`: `sum_n (n_i / N) p_n`.
pub fn strategy_frequency(
    pi: &StationaryDistribution,
    space: &StateSpace,
    i: usize,
) -> Result<f64> {
    check_len(space, pi)?;
    if i >= space.num_strategies() {
        return Err(Error::InvalidState(format!(
            "strategy index {i} out of range for {} strategies",
            space.num_strategies()
        )));
    }
    let pop = space.population() as f64;
    Ok(space
        .iter()
        .zip(pi.probs())
        .map(|(c, &p)| f64::from(c[i]) / pop * p)
        .sum())
}

/// All strategy frequencies at once.
pub fn strategy_frequencies(pi: &StationaryDistribution, space: &StateSpace) -> Result<Vec<f64>> {
    check_len(space, pi)?;
    let pop = space.population() as f64;
    let mut freq = vec![0.0; space.num_strategies()];
    for (c, &p) in space.iter().zip(pi.probs()) {
        for (f, &n) in freq.iter_mut().zip(c) {
            *f += f64::from(n) / pop * p;
        }
    }
    Ok(freq)
}

pub fn cooperation_frequency(
    spec: &ModelSpec,
    space: &StateSpace,
    pi: &StationaryDistribution,
    counting: CoopCounting,
) -> Result<f64> {
    check_consistent(spec, space, pi)?;
    let freq = strategy_frequencies(pi, space)?;
    let game = spec.game();
    Ok(freq
        .iter()
        .enumerate()
        .filter(|&(i, _)| match counting {
            CoopCounting::AllCooperative => game.is_cooperative(i),
            CoopCounting::PureCooperators => game.label(i) == "C",
        })
        .map(|(_, f)| f)
        .sum())
}

/// Total population payoff at `state`, institutional shifts included.
pub fn state_welfare(spec: &ModelSpec, state: &PopulationState) -> Result<f64> {
    // validates the state against the model
    spec.state_budget(state)?;
    Ok(spec.welfare_unchecked(state.counts()))
}

/// Per-capita expected welfare `sum_n SW(n) p_n / N`.
pub fn expected_welfare(
    spec: &ModelSpec,
    space: &StateSpace,
    pi: &StationaryDistribution,
) -> Result<f64> {
    check_consistent(spec, space, pi)?;
    let pop = spec.population() as f64;
    Ok(space
        .iter()
        .zip(pi.probs())
        .filter(|&(_, &p)| p != 0.0)
        .map(|(c, &p)| spec.welfare_unchecked(c) * p)
        .sum::<f64>()
        / pop)
}

/// Per-capita expected institutional outlay `sum_n theta_n p_n / N`.
pub fn expected_incentive_cost(
    spec: &ModelSpec,
    space: &StateSpace,
    pi: &StationaryDistribution,
) -> Result<f64> {
    check_consistent(spec, space, pi)?;
    if !spec.scheme().is_institutional() {
        return Ok(0.0);
    }
    let pop = spec.population() as f64;
    Ok(space
        .iter()
        .zip(pi.probs())
        .map(|(c, &p)| spec.budget_unchecked(c) * p)
        .sum::<f64>()
        / pop)
}

pub fn welfare_report(
    spec: &ModelSpec,
    space: &StateSpace,
    pi: &StationaryDistribution,
) -> Result<WelfareReport> {
    welfare_report_with(spec, space, pi, CoopCounting::default())
}

pub fn welfare_report_with(
    spec: &ModelSpec,
    space: &StateSpace,
    pi: &StationaryDistribution,
    counting: CoopCounting,
) -> Result<WelfareReport> {
    Ok(WelfareReport::new(
        cooperation_frequency(spec, space, pi, counting)?,
        expected_welfare(spec, space, pi)?,
        expected_incentive_cost(spec, space, pi)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{solve, SolverOptions};
    use crate::game::PdPayoffs;
    use crate::incentive::IncentiveScheme;
    use crate::model::EvolutionParams;

    fn spec(n: usize, mu: f64, beta: f64, scheme: IncentiveScheme) -> ModelSpec {
        ModelSpec::for_scheme(
            &PdPayoffs::standard(),
            scheme,
            EvolutionParams::new(n, mu, beta).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn state_welfare_examples() {
        let s = spec(3, 0.1, 0.1, IncentiveScheme::None);
        let st = PopulationState::new(vec![2, 1], 3).unwrap();
        assert_eq!(state_welfare(&s, &st).unwrap(), 2.0);
        for n in [2, 7, 50] {
            let s = spec(n, 0.1, 0.1, IncentiveScheme::None);
            let all_c = PopulationState::homogeneous(2, 0, n);
            let all_d = PopulationState::homogeneous(2, 1, n);
            assert_eq!(state_welfare(&s, &all_c).unwrap(), n as f64);
            assert_eq!(state_welfare(&s, &all_d).unwrap(), 0.0);
        }
    }

    #[test]
    fn point_mass_reports() {
        let s = spec(50, 0.1, 0.1, IncentiveScheme::None);
        let space = StateSpace::enumerate(50, 2).unwrap();
        let all_c = StationaryDistribution::point_mass(space.len(), 0);
        assert_eq!(expected_welfare(&s, &space, &all_c).unwrap(), 1.0);

        let all_d = StationaryDistribution::point_mass(space.len(), space.len() - 1);
        let r = welfare_report(&s, &space, &all_d).unwrap();
        assert_eq!(r, WelfareReport::new(0.0, 0.0, 0.0));
        assert_eq!(r.net_welfare_per_capita, 0.0);

        let s = spec(
            50,
            0.1,
            0.1,
            IncentiveScheme::InstitutionalReward { delta: 2.0, a: 0.7 },
        );
        let cost = expected_incentive_cost(&s, &space, &all_c).unwrap();
        assert!((cost - 2.0 / 0.7).abs() < 1e-12);
    }

    #[test]
    fn peer_schemes_cost_nothing_and_count_incentivisers() {
        let s = spec(
            10,
            0.05,
            0.3,
            IncentiveScheme::PeerPunishment {
                epsilon: 1.0,
                delta: 3.0,
            },
        );
        let sol = solve(&s, &SolverOptions::default()).unwrap();
        let pi = &sol.stationary;
        assert_eq!(expected_incentive_cost(&s, &sol.space, pi).unwrap(), 0.0);
        let f = strategy_frequencies(pi, &sol.space).unwrap();
        let all = cooperation_frequency(&s, &sol.space, pi, CoopCounting::AllCooperative).unwrap();
        let pure =
            cooperation_frequency(&s, &sol.space, pi, CoopCounting::PureCooperators).unwrap();
        assert!((all - (f[0] + f[2])).abs() < 1e-15);
        assert!((pure - f[0]).abs() < 1e-15);
        assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tiny_chain_frequency_and_welfare() {
        // Independent high-precision reference for N=3, mu=0.05, beta=0.1.
        // With R=1, S=-1, T=2, P=0 the state welfare equals n_C, so the
        // per-capita welfare coincides with f_C.
        let s = spec(3, 0.05, 0.1, IncentiveScheme::None);
        let sol = solve(&s, &SolverOptions::default()).unwrap();
        let fc = strategy_frequency(&sol.stationary, &sol.space, 0).unwrap();
        let sw = expected_welfare(&s, &sol.space, &sol.stationary).unwrap();
        assert!((fc - 0.43919452282595840149).abs() < 1e-14);
        assert!((sw - 0.43919452282595840149).abs() < 1e-14);
    }

    #[test]
    fn welfare_is_a_convex_combination() {
        let s = spec(
            12,
            0.02,
            2.0,
            IncentiveScheme::InstitutionalPunishment { delta: 1.5, b: 2.0 },
        );
        let sol = solve(&s, &SolverOptions::default()).unwrap();
        let per_state: Vec<f64> = sol
            .space
            .iter()
            .map(|c| s.welfare_unchecked(c) / 12.0)
            .collect();
        let lo = per_state.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = per_state.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sw = expected_welfare(&s, &sol.space, &sol.stationary).unwrap();
        assert!(lo <= sw && sw <= hi);
    }

    #[test]
    fn errors() {
        let s = spec(5, 0.1, 0.1, IncentiveScheme::None);
        let space = StateSpace::enumerate(5, 2).unwrap();
        let wrong = StationaryDistribution::point_mass(3, 0);
        assert!(strategy_frequency(&wrong, &space, 0).is_err());
        let pi = StationaryDistribution::point_mass(space.len(), 0);
        assert!(strategy_frequency(&pi, &space, 2).is_err());
        let other = StateSpace::enumerate(5, 3).unwrap();
        assert!(expected_welfare(
            &s,
            &other,
            &StationaryDistribution::point_mass(other.len(), 0)
        )
        .is_err());
    }
}
