//! Fast invariant checks on the model stack, run by `welfare selftest`.

use welfare_core::engine::{
    power_iteration, solve, stationary_distribution, SolverOptions, StateSpace, TransitionMatrix,
};
use welfare_core::metrics::{strategy_frequencies, welfare_report};
use welfare_core::simulate::{self, SimConfig};
use welfare_core::{EvolutionParams, IncentiveScheme, ModelSpec, PdPayoffs};

pub struct Check {
    pub name: &'static str,
    pub outcome: Result<(), String>,
}

type Outcome = Result<(), String>;
type CheckFn = fn() -> Outcome;

fn schemes() -> [IncentiveScheme; 5] {
    [
        IncentiveScheme::None,
        IncentiveScheme::PeerPunishment {
            epsilon: 1.0,
            delta: 2.5,
        },
        IncentiveScheme::PeerReward {
            epsilon: 1.0,
            delta: 1.5,
        },
        IncentiveScheme::InstitutionalReward { delta: 1.2, a: 0.7 },
        IncentiveScheme::InstitutionalPunishment { delta: 1.6, b: 3.0 },
    ]
}

fn spec(
    pd: &PdPayoffs,
    scheme: IncentiveScheme,
    n: usize,
    mu: f64,
    beta: f64,
) -> Result<ModelSpec, String> {
    let params = EvolutionParams::new(n, mu, beta).map_err(|e| e.to_string())?;
    ModelSpec::for_scheme(pd, scheme, params).map_err(|e| e.to_string())
}

fn matrix(s: &ModelSpec) -> Result<TransitionMatrix, String> {
    let space =
        StateSpace::enumerate(s.population(), s.num_strategies()).map_err(|e| e.to_string())?;
    TransitionMatrix::build(s, &space).map_err(|e| e.to_string())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn stochastic_rows() -> Outcome {
    for scheme in schemes() {
        for (n, mu, beta) in [(2, 0.5, 0.0), (17, 0.01, 1.0), (30, 0.001, 5.0)] {
            let w = matrix(&spec(&PdPayoffs::standard(), scheme, n, mu, beta)?)?;
            let err = w.max_row_sum_error();
            ensure(err <= 1e-12, || {
                format!("{} N={n}: row sum error {err:e}", scheme.name())
            })?;
        }
    }
    Ok(())
}

fn stationary_residual() -> Outcome {
    for scheme in schemes() {
        let s = spec(&PdPayoffs::standard(), scheme, 25, 0.001, 0.1)?;
        let sol = solve(&s, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let r = sol.stationary.residual();
        ensure(r < 1e-10, || format!("{}: residual {r:e}", scheme.name()))?;
    }
    Ok(())
}

fn pure_mutation_is_uniform() -> Outcome {
    for scheme in schemes() {
        let s = spec(&PdPayoffs::standard(), scheme, 12, 1.0, 2.0)?;
        let sol = solve(&s, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let f = strategy_frequencies(&sol.stationary, &sol.space).map_err(|e| e.to_string())?;
        let m = f.len() as f64;
        ensure(f.iter().all(|x| (x - 1.0 / m).abs() <= 1e-6), || {
            format!("{}: frequencies {f:?}", scheme.name())
        })?;
    }
    Ok(())
}

fn neutral_selection_ignores_game() -> Outcome {
    let other = PdPayoffs::new(3.0, -2.0, 5.0, 0.5).map_err(|e| e.to_string())?;
    for scheme in schemes() {
        let a = spec(&PdPayoffs::standard(), scheme, 15, 0.02, 0.0)?;
        let b = spec(&other, scheme, 15, 0.02, 0.0)?;
        let pa = solve(&a, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let pb = solve(&b, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let d = max_diff(pa.stationary.probs(), pb.stationary.probs());
        ensure(d <= 1e-12, || {
            format!("{}: max difference {d:e}", scheme.name())
        })?;
    }
    Ok(())
}

fn translation_invariance() -> Outcome {
    for scheme in schemes() {
        let s = spec(&PdPayoffs::standard(), scheme, 15, 0.05, 1.0)?;
        let t = s.with_shifted_payoffs(7.3);
        let (w0, w1) = (matrix(&s)?, matrix(&t)?);
        let d = max_diff(&flatten(&w0), &flatten(&w1));
        ensure(d <= 1e-12, || {
            format!("{}: W differs by {d:e}", scheme.name())
        })?;
        let opts = SolverOptions::default();
        let p0 = stationary_distribution(&w0, &opts).map_err(|e| e.to_string())?;
        let p1 = stationary_distribution(&w1, &opts).map_err(|e| e.to_string())?;
        let d = max_diff(p0.probs(), p1.probs());
        ensure(d <= 1e-12, || {
            format!("{}: pi differs by {d:e}", scheme.name())
        })?;
    }
    Ok(())
}

fn institutional_equivalence() -> Outcome {
    for delta in [0.3, 1.0, 2.2] {
        let r = spec(
            &PdPayoffs::standard(),
            IncentiveScheme::InstitutionalReward { delta, a: 0.7 },
            20,
            0.01,
            0.5,
        )?;
        let p = spec(
            &PdPayoffs::standard(),
            IncentiveScheme::InstitutionalPunishment { delta, b: 3.0 },
            20,
            0.01,
            0.5,
        )?;
        let sr = solve(&r, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let sp = solve(&p, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let cr = welfare_report(&r, &sr.space, &sr.stationary).map_err(|e| e.to_string())?;
        let cp = welfare_report(&p, &sp.space, &sp.stationary).map_err(|e| e.to_string())?;
        let d = (cr.coop_frequency - cp.coop_frequency).abs();
        ensure(d <= 1e-12, || {
            format!("delta={delta}: cooperation differs by {d:e}")
        })?;
    }
    Ok(())
}

fn solvers_agree() -> Outcome {
    for scheme in schemes() {
        let w = matrix(&spec(&PdPayoffs::standard(), scheme, 6, 0.05, 1.0)?)?;
        let direct =
            stationary_distribution(&w, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let power = power_iteration(&w, 1e-14, 1_000_000, None).map_err(|e| e.to_string())?;
        let d = max_diff(direct.probs(), power.probs());
        ensure(d <= 1e-10, || {
            format!("{}: methods differ by {d:e}", scheme.name())
        })?;
    }
    Ok(())
}

fn simulation_agrees() -> Outcome {
    let s = spec(&PdPayoffs::standard(), IncentiveScheme::None, 10, 0.1, 0.5)?;
    let sol = solve(&s, &SolverOptions::default()).map_err(|e| e.to_string())?;
    let exact = welfare_report(&s, &sol.space, &sol.stationary).map_err(|e| e.to_string())?;
    let est = simulate::run(&SimConfig::new(s, 1_000_000, 1)).map_err(|e| e.to_string())?;
    let z = (est.coop_frequency - exact.coop_frequency).abs() / est.coop_std_error;
    ensure(z <= 4.0, || {
        format!(
            "estimate {} +- {} vs exact {}",
            est.coop_frequency, est.coop_std_error, exact.coop_frequency
        )
    })
}

fn flatten(w: &TransitionMatrix) -> Vec<f64> {
    w.to_dense().into_iter().flatten().collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn run() -> Vec<Check> {
    let checks: [(&'static str, CheckFn); 8] = [
        ("transition rows sum to one", stochastic_rows),
        ("stationary residual below 1e-10", stationary_residual),
        ("mu = 1 gives uniform frequencies", pure_mutation_is_uniform),
        (
            "beta = 0 makes pi game independent",
            neutral_selection_ignores_game,
        ),
        (
            "payoff translation leaves W and pi unchanged",
            translation_invariance,
        ),
        (
            "institutional reward and punishment cooperate equally",
            institutional_equivalence,
        ),
        ("direct and power solvers agree", solvers_agree),
        ("simulation matches the exact solution", simulation_agrees),
    ];
    checks
        .into_iter()
        .map(|(name, f)| Check { name, outcome: f() })
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run() {
            assert!(c.outcome.is_ok(), "{}: {:?}", c.name, c.outcome);
        }
    }
}
