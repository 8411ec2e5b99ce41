use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::TraitVector;

/// Mutable per-actor state. Every field is a fraction in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActorState {
    /// Self-perceived knowledge.
    pub k: f64,
    /// Reputation.
    pub r: f64,
    /// Popularity.
    pub p: f64,
    /// Fraction of the true assertions this actor knows.
    pub f_plus: f64,
    /// Fraction of the false assertions this actor knows.
    pub f_minus: f64,
}

impl ActorState {
    pub fn new(k: f64, r: f64, p: f64, f_plus: f64, f_minus: f64) -> Result<Self> {
        let s = Self {
            k,
            r,
            p,
            f_plus,
            f_minus,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("k", self.k),
            ("r", self.r),
            ("p", self.p),
            ("f_plus", self.f_plus),
            ("f_minus", self.f_minus),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(name, format!("must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

/// An actor: current state plus fixed personality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Actor {
    pub state: ActorState,
    pub traits: TraitVector,
}

impl Actor {
    pub fn new(state: ActorState, traits: TraitVector) -> Self {
        Self { state, traits }
    }
}
