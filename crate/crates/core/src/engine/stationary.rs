//! Stationary distribution of a row-stochastic transition matrix: the
//! normalised left eigenvector at eigenvalue 1.
//!
//! Two solvers are provided.
//!
//! * [`gth`]: Grassmann–Taksar–Heyman state reduction restricted to the
//!   matrix band. It performs no subtractions, so it is accurate to rounding
//!   even when the chain is nearly decomposable (small mutation rates), and
//!   costs `O(n * bw^2)`.
//! * [`power_iteration`]: repeated lazy left multiplication
//!   `x <- (x + x W) / 2`, stopped on the sup-norm residual `|x W - x|`.
//!   Convergence slows with the spectral gap, which shrinks roughly like
//!   `mu / N`.
//!
//! [`stationary_distribution`] dispatches on [`SolverOptions::method`] and
//! always reports the residual of the vector it returns.

use crate::error::{Error, Result};

use super::transition::TransitionMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverMethod {
    /// Banded GTH elimination, polished by power iteration if its residual
    /// misses the tolerance.
    #[default]
    Direct,
    PowerIteration,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub method: SolverMethod,
    /// Required bound on `|pi W - pi|_inf`.
    pub tol: f64,
    pub max_iter: usize,
    /// Solve chains built with `mu = 0` anyway; the answer then depends on
    /// the method and starting vector.
    pub allow_reducible: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: SolverMethod::Direct,
            tol: 1e-12,
            max_iter: 1_000_000,
            allow_reducible: false,
        }
    }
}

impl SolverOptions {
    pub fn power(tol: f64, max_iter: usize) -> Self {
        Self {
            method: SolverMethod::PowerIteration,
            tol,
            max_iter,
            ..Self::default()
        }
    }
}

/// A probability vector over the state space together with its achieved
/// stationarity residual.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    probs: Vec<f64>,
    residual: f64,
    iterations: usize,
}

impl StationaryDistribution {
    /// Wraps an arbitrary probability vector (e.g. a point mass) so metrics
    /// can be evaluated on it. The vector is normalised; the residual is
    /// recorded as NaN because no matrix is involved.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidState(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidState("probabilities sum to zero".into()));
        }
        Ok(Self {
            probs: probs.into_iter().map(|p| p / total).collect(),
            residual: f64::NAN,
            iterations: 0,
        })
    }

    /// Point mass on state `k` of a space of size `len`.
    pub fn point_mass(len: usize, k: usize) -> Self {
        let mut probs = vec![0.0; len];
        probs[k] = 1.0;
        Self {
            probs,
            residual: f64::NAN,
            iterations: 0,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Power-iteration sweeps spent (0 for a pure direct solve).
    pub fn iterations(&self) -> usize {
        self.iterations
    }
}

/// Solves `pi W = pi`, `sum(pi) = 1` with the configured method.
pub fn stationary_distribution(
    w: &TransitionMatrix,
    opts: &SolverOptions,
) -> Result<StationaryDistribution> {
    if !(opts.tol > 0.0) {
        return Err(Error::Configuration(format!(
            "solver tolerance must be > 0, got {}",
            opts.tol
        )));
    }
    if w.mutation_rate() == 0.0 && !opts.allow_reducible {
        return Err(Error::NotErgodic);
    }
    match opts.method {
        SolverMethod::PowerIteration => power_iteration(w, opts.tol, opts.max_iter, None),
        SolverMethod::Direct => {
            let probs = gth(w)?;
            let residual = w.stationarity_residual(&probs);
            if residual <= opts.tol {
                Ok(StationaryDistribution {
                    probs,
                    residual,
                    iterations: 0,
                })
            } else {
                power_iteration(w, opts.tol, opts.max_iter, Some(&probs))
            }
        }
    }
}

/// Left power iteration from `initial` (uniform when `None`).
///
/// Returns the first iterate whose residual `|x W - x|_inf` is at most `tol`.
/// The update is the lazy step `x <- (x + x W) / 2`, which has the same fixed
/// point but also converges when the chain is periodic (e.g. `mu = 1`, `N = 2`).
pub fn power_iteration(
    w: &TransitionMatrix,
    tol: f64,
    max_iter: usize,
    initial: Option<&[f64]>,
) -> Result<StationaryDistribution> {
    let n = w.dim();
    let mut x = match initial {
        Some(v) => {
            if v.len() != n {
                return Err(Error::Configuration(format!(
                    "initial vector has length {}, matrix has dimension {n}",
                    v.len()
                )));
            }
            v.to_vec()
        }
        None => vec![1.0 / n as f64; n],
    };
    normalise(&mut x);
    let mut y = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 0..=max_iter {
        w.left_mul(&x, &mut y);
        residual = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual <= tol {
            return Ok(StationaryDistribution {
                probs: x,
                residual,
                iterations: it,
            });
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = 0.5 * (*xi + yi);
        }
        normalise(&mut x);
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual,
    })
}

/// Grassmann–Taksar–Heyman elimination on the band of `w`.
///
/// States are censored from the highest index down; each censoring step
/// folds the paths through state `k` into the remaining block. The
/// stationary vector is then rebuilt by forward substitution.
pub fn gth(w: &TransitionMatrix) -> Result<Vec<f64>> {
    let n = w.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let bw = w.bandwidth();
    let width = 2 * bw + 1;
    let at = |i: usize, j: usize| i * width + j + bw - i;

    let mut band = vec![0.0; n * width];
    for i in 0..n {
        let (cols, vals) = w.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if j != i {
                band[at(i, j)] = v;
            }
        }
    }

    // exit[k] = probability mass leaving k towards lower indices after
    // states above k have been censored
    let mut exit = vec![0.0; n];
    for k in (1..n).rev() {
        let lo = k.saturating_sub(bw);
        let s: f64 = (lo..k).map(|j| band[at(k, j)]).sum();
        if !(s > 0.0) {
            return Err(Error::Reducible { state: k });
        }
        exit[k] = s;
        for i in lo..k {
            let pik = band[at(i, k)];
            if pik == 0.0 {
                continue;
            }
            let f = pik / s;
            for j in lo..k {
                if j != i {
                    let pkj = band[at(k, j)];
                    band[at(i, j)] += f * pkj;
                }
            }
        }
    }

    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for k in 1..n {
        let lo = k.saturating_sub(bw);
        let inflow: f64 = (lo..k).map(|i| pi[i] * band[at(i, k)]).sum();
        pi[k] = inflow / exit[k];
    }
    normalise(&mut pi);
    Ok(pi)
}

fn normalise(x: &mut [f64]) {
    let total: f64 = x.iter().sum();
    if total > 0.0 {
        for v in x.iter_mut() {
            *v /= total;
        }
    }
}
