//! Point evaluation and the parallel sweep driver.

use rayon::prelude::*;
use welfare_core::engine::solve;
use welfare_core::metrics::welfare_report;
use welfare_core::simulate::{self, replicate_seed};
use welfare_core::WelfareReport;

use crate::config::{Config, Method, Point};
use crate::error::{CliError, Result};
use crate::record::{Diagnostics, Outcome, Record};

/// Evaluates one grid point. `index` is the point's position in the grid;
/// Monte Carlo runs derive their seed from it so results do not depend on
/// scheduling.
pub fn evaluate(
    point: &Point,
    method: &Method,
    index: usize,
) -> Result<(WelfareReport, Diagnostics)> {
    let spec = point.spec()?;
    match method {
        Method::Exact(opts) => {
            let sol = solve(&spec, opts)?;
            let report = welfare_report(&spec, &sol.space, &sol.stationary)?;
            Ok((
                report,
                Diagnostics::Exact {
                    states: sol.space.len(),
                    residual: sol.stationary.residual(),
                    iterations: sol.stationary.iterations(),
                },
            ))
        }
        Method::MonteCarlo(mc) => {
            let cfg = mc.sim_config(spec, replicate_seed(mc.seed, index as u64));
            let est = simulate::run(&cfg)?;
            let report =
                WelfareReport::new(est.coop_frequency, est.welfare_estimate, est.cost_estimate);
            Ok((
                report,
                Diagnostics::MonteCarlo {
                    samples: est.samples,
                    coop_se: est.coop_std_error,
                    welfare_se: est.welfare_std_error,
                    cost_se: est.cost_std_error,
                },
            ))
        }
    }
}

fn record(point: &Point, method: &Method, index: usize) -> Record {
    let outcome = match evaluate(point, method, index) {
        Ok((report, diag)) => {
            let values = [
                report.coop_frequency,
                report.gross_welfare_per_capita,
                report.incentive_cost_per_capita,
                report.net_welfare_per_capita,
            ];
            if values.iter().all(|v| v.is_finite()) {
                Outcome::Ok { report, diag }
            } else {
                Outcome::Failed(format!("non-finite output ({diag})"))
            }
        }
        Err(e) => Outcome::Failed(e.to_string()),
    };
    Record {
        point: *point,
        method: method.name(),
        outcome,
    }
}

/// Evaluates every grid point, `jobs` at a time (all cores when `None`).
/// Rows come back in grid order whatever the degree of parallelism; a point
/// that fails is recorded as such and the others still run.
pub fn run_sweep(config: &Config, jobs: Option<usize>) -> Result<Vec<Record>> {
    let points = config.points()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs:?} workers: {e}")))?;
    Ok(pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, p)| record(p, &config.method, i))
            .collect()
    }))
}
