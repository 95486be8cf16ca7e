//! The one-step transition matrix of the mutation–imitation process.

use crate::error::{Error, Result};
use crate::model::{EvolutionParams, ModelSpec};

use super::states::StateSpace;

/// Probability that an individual with fitness `f_a` adopts the strategy of
/// one with fitness `f_b` under the Fermi rule
/// `1 / (1 + exp(beta * (f_a - f_b)))`.
///
/// Evaluated so that large `beta * |f_a - f_b|` saturates to 0 or 1 instead
/// of overflowing.
#[inline]
pub fn imitation_probability(f_a: f64, f_b: f64, beta: f64) -> f64 {
    let x = beta * (f_a - f_b);
    if x == 0.0 {
        return 0.5;
    }
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Row-stochastic sparse matrix in compressed-row form.
///
/// Row `k` holds the probabilities of moving from state `k` to each reachable
/// state, diagonal included. Column indices within a row are ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    mutation_rate: f64,
}

impl TransitionMatrix {
    /// Builds the matrix for `spec` over `space`.
    ///
    /// From state `n`, a strategy-`i` individual switches to strategy `j`
    /// with probability `(n_i/N) * (mu/(m-1) + (1-mu) * (n_j/N) * P(i -> j))`
    /// where `P` is the Fermi imitation probability evaluated on the effective
    /// payoffs at `n`. The remaining mass stays on the diagonal.
    pub fn build(spec: &ModelSpec, space: &StateSpace) -> Result<Self> {
        let m = spec.num_strategies();
        let n = spec.population();
        if space.num_strategies() != m || space.population() != n {
            return Err(Error::Configuration(format!(
                "model has N={n}, m={m} but state space has N={}, m={}",
                space.population(),
                space.num_strategies()
            )));
        }
        let EvolutionParams { mu, beta, .. } = *spec.params();
        let pop = n as f64;
        let mutation_share = mu / (m - 1) as f64;

        let dim = space.len();
        let max_row = m * (m - 1) + 1;
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(dim * max_row);
        let mut vals = Vec::with_capacity(dim * max_row);
        row_ptr.push(0);

        let mut payoffs = vec![0.0; m];
        let mut next = vec![0u32; m];
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(max_row);

        for (k, counts) in space.iter().enumerate() {
            spec.payoffs_into(counts, &mut payoffs);
            row.clear();
            let mut leave = 0.0;
            for i in 0..m {
                if counts[i] == 0 {
                    continue;
                }
                let pick = f64::from(counts[i]) / pop;
                for j in 0..m {
                    if j == i {
                        continue;
                    }
                    let imitate = if counts[j] > 0 {
                        (1.0 - mu)
                            * (f64::from(counts[j]) / pop)
                            * imitation_probability(payoffs[i], payoffs[j], beta)
                    } else {
                        0.0
                    };
                    let rate = pick * (mutation_share + imitate);
                    if rate > 0.0 {
                        next.copy_from_slice(counts);
                        next[i] -= 1;
                        next[j] += 1;
                        row.push((space.rank(&next), rate));
                        leave += rate;
                    }
                }
            }
            row.push((k, 1.0 - leave));
            row.sort_unstable_by_key(|&(c, _)| c);
            for &(c, v) in &row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }

        Ok(Self {
            dim,
            row_ptr,
            cols,
            vals,
            mutation_rate: mu,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Mutation rate of the generating model; zero means the chain may be
    /// reducible.
    pub fn mutation_rate(&self) -> f64 {
        self.mutation_rate
    }

    /// Column indices and probabilities of row `k`.
    #[inline]
    pub fn row(&self, k: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[k]..self.row_ptr[k + 1];
        (&self.cols[span.clone()], &self.vals[span])
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |p| vals[p])
    }

    pub fn row_sum(&self, k: usize) -> f64 {
        self.row(k).1.iter().sum()
    }

    /// Largest `|row sum - 1|` over all rows.
    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.dim)
            .map(|k| (self.row_sum(k) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Maximum number of stored entries in any row.
    pub fn max_row_nnz(&self) -> usize {
        self.row_ptr
            .windows(2)
            .map(|w| w[1] - w[0])
            .max()
            .unwrap_or(0)
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.dim)
            .flat_map(|i| self.row(i).0.iter().map(move |&j| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    /// `out = x W` (row vector times matrix).
    pub fn left_mul(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        out.fill(0.0);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                out[j] += xi * w;
            }
        }
    }

    /// `max_j |(x W)_j - x_j|`.
    pub fn stationarity_residual(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.dim];
        self.left_mul(x, &mut y);
        y.iter()
            .zip(x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Dense row-major copy, for diagnostics and small-instance checks.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.dim]; self.dim];
        for (i, row) in dense.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                row[j] = v;
            }
        }
        dense
    }
}
