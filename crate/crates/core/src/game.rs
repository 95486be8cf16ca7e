//! Symmetric two-player games in normal form.
//!
//! A [`GameSpec`] holds an `m × m` payoff matrix where entry `(i, j)` is the
//! payoff to a strategy-`i` player meeting a strategy-`j` co-player. The
//! Prisoner's Dilemma and its two peer-incentive extensions are built from a
//! [`PdPayoffs`] value.

use crate::error::{Error, Result};

/// Labels that denote strategies which cooperate in the underlying dilemma.
const COOPERATIVE_LABELS: [&str; 3] = ["C", "SP", "SR"];

/// The four Prisoner's Dilemma payoffs: reward, sucker, temptation, punishment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdPayoffs {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub p: f64,
}

impl PdPayoffs {
    /// Checked constructor enforcing `T > R > P > S`.
    pub fn new(r: f64, s: f64, t: f64, p: f64) -> Result<Self> {
        let pd = Self { r, s, t, p };
        pd.validate()?;
        Ok(pd)
    }

    /// The `R = 1, S = -1, T = 2, P = 0` dilemma used throughout the figures.
    pub fn standard() -> Self {
        Self {
            r: 1.0,
            s: -1.0,
            t: 2.0,
            p: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { r, s, t, p } = *self;
        if ![r, s, t, p].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidGame("payoffs must be finite".into()));
        }
        if !(t > r && r > p && p > s) {
            return Err(Error::InvalidGame(format!(
                "Prisoner's Dilemma requires T > R > P > S, got R={r}, S={s}, T={t}, P={p}"
            )));
        }
        Ok(())
    }
}

/// A symmetric `m`-strategy game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    labels: Vec<String>,
    payoff: Vec<f64>,
    cooperative: Vec<bool>,
}

impl GameSpec {
    /// Builds a game from labels and a row-major payoff matrix.
    ///
    /// Strategies labelled `C`, `SP` or `SR` are marked as cooperative.
    pub fn new<S: Into<String>>(labels: Vec<S>, payoff: Vec<Vec<f64>>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let m = labels.len();
        if m < 2 {
            return Err(Error::InvalidGame(format!(
                "need at least 2 strategies, got {m}"
            )));
        }
        if payoff.len() != m || payoff.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidGame(format!(
                "payoff matrix must be {m}x{m} to match the labels"
            )));
        }
        let flat: Vec<f64> = payoff.into_iter().flatten().collect();
        if let Some(bad) = flat.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidGame(format!("non-finite payoff entry {bad}")));
        }
        let cooperative = labels
            .iter()
            .map(|l| COOPERATIVE_LABELS.contains(&l.as_str()))
            .collect();
        Ok(Self {
            labels,
            payoff: flat,
            cooperative,
        })
    }

    /// The plain two-strategy dilemma over `(C, D)`.
    pub fn prisoners_dilemma(pd: &PdPayoffs) -> Result<Self> {
        pd.validate()?;
        Self::new(vec!["C", "D"], vec![vec![pd.r, pd.s], vec![pd.t, pd.p]])
    }

    /// Three-strategy game over `(C, D, SP)`: the peer punisher cooperates and
    /// pays `epsilon` per defecting co-player to lower that defector's payoff
    /// by `delta`.
    pub fn peer_punishment(pd: &PdPayoffs, epsilon: f64, delta: f64) -> Result<Self> {
        pd.validate()?;
        check_incentive(epsilon, delta)?;
        let PdPayoffs { r, s, t, p } = *pd;
        Self::new(
            vec!["C", "D", "SP"],
            vec![
                vec![r, s, r],
                vec![t, p, t - delta],
                vec![r, s - epsilon, r],
            ],
        )
    }

    /// Three-strategy game over `(C, D, SR)`: the peer rewarder cooperates and
    /// pays `epsilon` per cooperating co-player to raise that co-player's
    /// payoff by `delta`.
    pub fn peer_reward(pd: &PdPayoffs, epsilon: f64, delta: f64) -> Result<Self> {
        pd.validate()?;
        check_incentive(epsilon, delta)?;
        let PdPayoffs { r, s, t, p } = *pd;
        Self::new(
            vec!["C", "D", "SR"],
            vec![
                vec![r, s, r + delta],
                vec![t, p, t],
                vec![r - epsilon, s, r - epsilon + delta],
            ],
        )
    }

    pub fn num_strategies(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Payoff to strategy `i` against strategy `j`.
    #[inline]
    pub fn payoff(&self, i: usize, j: usize) -> f64 {
        self.payoff[i * self.labels.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.labels.len();
        &self.payoff[i * m..(i + 1) * m]
    }

    pub fn is_cooperative(&self, i: usize) -> bool {
        self.cooperative[i]
    }

    /// Same game with `c` added to every payoff entry.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            labels: self.labels.clone(),
            payoff: self.payoff.iter().map(|v| v + c).collect(),
            cooperative: self.cooperative.clone(),
        }
    }
}

fn check_incentive(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidGame(format!(
            "epsilon must be >= 0, got {epsilon}"
        )));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidGame(format!(
            "delta must be >= 0, got {delta}"
        )));
    }
    Ok(())
}
