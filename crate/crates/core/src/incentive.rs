use crate::error::{Error, Result};
use crate::game::GameSpec;

/// How (and by whom) cooperation is incentivised.
///
/// Peer schemes are carried entirely by the three-strategy payoff matrix; the
/// scheme value records the parameters and fixes the expected strategy layout.
/// Institutional schemes shift the payoff of every targeted individual by
/// `delta` and cost the institution `delta / a` (reward) or `delta / b`
/// (punishment) per target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IncentiveScheme {
    None,
    PeerPunishment { epsilon: f64, delta: f64 },
    PeerReward { epsilon: f64, delta: f64 },
    InstitutionalReward { delta: f64, a: f64 },
    InstitutionalPunishment { delta: f64, b: f64 },
}

impl IncentiveScheme {
    /// Stable identifier used in configuration files and CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::PeerPunishment { .. } => "peer_punishment",
            Self::PeerReward { .. } => "peer_reward",
            Self::InstitutionalReward { .. } => "institutional_reward",
            Self::InstitutionalPunishment { .. } => "institutional_punishment",
        }
    }

    pub fn is_peer(&self) -> bool {
        matches!(self, Self::PeerPunishment { .. } | Self::PeerReward { .. })
    }

    pub fn is_institutional(&self) -> bool {
        matches!(
            self,
            Self::InstitutionalReward { .. } | Self::InstitutionalPunishment { .. }
        )
    }

    pub fn delta(&self) -> Option<f64> {
        match *self {
            Self::None => None,
            Self::PeerPunishment { delta, .. }
            | Self::PeerReward { delta, .. }
            | Self::InstitutionalReward { delta, .. }
            | Self::InstitutionalPunishment { delta, .. } => Some(delta),
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            Self::PeerPunishment { epsilon, .. } | Self::PeerReward { epsilon, .. } => {
                Some(epsilon)
            }
            _ => None,
        }
    }

    pub fn reward_efficiency(&self) -> Option<f64> {
        match *self {
            Self::InstitutionalReward { a, .. } => Some(a),
            _ => None,
        }
    }

    pub fn punishment_efficiency(&self) -> Option<f64> {
        match *self {
            Self::InstitutionalPunishment { b, .. } => Some(b),
            _ => None,
        }
    }

    /// Checks parameter ranges and that the game has the strategy layout the
    /// scheme expects.
    pub fn validate_for(&self, game: &GameSpec) -> Result<()> {
        let nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidScheme(format!(
                    "{name} must be >= 0, got {v}"
                )))
            }
        };
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidScheme(format!("{name} must be > 0, got {v}")))
            }
        };
        let layout = |expected: &[&str]| {
            if game
                .labels()
                .iter()
                .map(String::as_str)
                .eq(expected.iter().copied())
            {
                Ok(())
            } else {
                Err(Error::InvalidScheme(format!(
                    "{} requires strategies {:?}, game has {:?}",
                    self.name(),
                    expected,
                    game.labels()
                )))
            }
        };
        match *self {
            Self::None => Ok(()),
            Self::PeerPunishment { epsilon, delta } => {
                nonneg("epsilon", epsilon)?;
                nonneg("delta", delta)?;
                layout(&["C", "D", "SP"])
            }
            Self::PeerReward { epsilon, delta } => {
                nonneg("epsilon", epsilon)?;
                nonneg("delta", delta)?;
                layout(&["C", "D", "SR"])
            }
            Self::InstitutionalReward { delta, a } => {
                nonneg("delta", delta)?;
                positive("a", a)?;
                layout(&["C", "D"])
            }
            Self::InstitutionalPunishment { delta, b } => {
                nonneg("delta", delta)?;
                positive("b", b)?;
                layout(&["C", "D"])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::PdPayoffs;

    #[test]
    fn arity_is_checked() {
        let pd = PdPayoffs::standard();
        let two = GameSpec::prisoners_dilemma(&pd).unwrap();
        let sp = GameSpec::peer_punishment(&pd, 1.0, 2.0).unwrap();
        let sr = GameSpec::peer_reward(&pd, 1.0, 2.0).unwrap();

        let inst = IncentiveScheme::InstitutionalReward { delta: 1.0, a: 1.0 };
        assert!(inst.validate_for(&two).is_ok());
        assert!(inst.validate_for(&sp).is_err());

        let peer = IncentiveScheme::PeerPunishment {
            epsilon: 1.0,
            delta: 2.0,
        };
        assert!(peer.validate_for(&sp).is_ok());
        assert!(peer.validate_for(&sr).is_err());
        assert!(peer.validate_for(&two).is_err());
        assert!(IncentiveScheme::None.validate_for(&sr).is_ok());
    }

    #[test]
    fn efficiency_must_be_positive() {
        let two = GameSpec::prisoners_dilemma(&PdPayoffs::standard()).unwrap();
        let s = IncentiveScheme::InstitutionalPunishment { delta: 1.0, b: 0.0 };
        assert!(matches!(s.validate_for(&two), Err(Error::InvalidScheme(_))));
        let s = IncentiveScheme::InstitutionalReward {
            delta: -1.0,
            a: 1.0,
        };
        assert!(s.validate_for(&two).is_err());
    }
}
