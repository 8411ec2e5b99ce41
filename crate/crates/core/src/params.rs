//! Network-wide constants and actor personality weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a newly learned assertion moves self-perceived knowledge `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KnowledgeRule {
    /// Close the gap to 1 in proportion to the share of unknown assertion
    /// mass the new assertion represents. `k` reaches 1 exactly when every
    /// assertion is known.
    #[default]
    Proportional,
    /// Add a fixed `1/(N·Z)` (true) or `λ/(N·Z)` (false) to `k`, clamped at 1.
    Fixed,
}

/// Constants shared by every game in a network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalParams {
    /// Probability that an assertion is true.
    pub phi: f64,
    /// Popularity decay applied to both participants at the start of a game.
    pub delta: f64,
    /// Rumor discount: a false assertion is worth `lambda` of a true one.
    pub lambda: f64,
    /// Number of assertions circulating in the network.
    pub n_assertions: u64,
    /// Reputation step size on feedback.
    pub gamma_r: f64,
    /// Popularity gain per visible act (assertion or feedback sent).
    pub gamma_p: f64,
    /// Effort cost of sending an assertion.
    pub cost_send: f64,
    /// Effort cost of sending feedback.
    pub cost_feedback: f64,
    pub knowledge_rule: KnowledgeRule,
}

impl Default for GlobalParams {
    fn default() -> Self {
        Self {
            phi: 0.8,
            delta: 0.1,
            lambda: 0.5,
            n_assertions: 2000,
            gamma_r: 0.1,
            gamma_p: 0.05,
            cost_send: 0.001,
            cost_feedback: 0.001,
            knowledge_rule: KnowledgeRule::Proportional,
        }
    }
}

fn check_unit(field: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must lie in [0, 1], got {v}")))
    }
}

fn check_step(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must lie in (0, 1], got {v}")))
    }
}

fn check_cost(field: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be a finite value >= 0, got {v}")))
    }
}

impl GlobalParams {
    pub fn validate(&self) -> Result<()> {
        check_unit("phi", self.phi)?;
        check_unit("delta", self.delta)?;
        check_unit("lambda", self.lambda)?;
        if self.n_assertions == 0 {
            return Err(Error::invalid("n_assertions", "must be >= 1, got 0"));
        }
        check_step("gamma_r", self.gamma_r)?;
        check_step("gamma_p", self.gamma_p)?;
        check_cost("cost_send", self.cost_send)?;
        check_cost("cost_feedback", self.cost_feedback)
    }

    /// `Z = φ + λ(1−φ)`: total knowledge weight of the whole assertion pool.
    pub fn knowledge_norm(&self) -> f64 {
        self.phi + self.lambda * (1.0 - self.phi)
    }

    /// Knowledge value of one true assertion, `1/(N·Z)`.
    pub fn true_gain(&self) -> f64 {
        let z = self.knowledge_norm();
        if z > 0.0 {
            1.0 / (self.n_assertions as f64 * z)
        } else {
            0.0
        }
    }

    /// Knowledge value of one false assertion, `λ/(N·Z)`.
    pub fn false_gain(&self) -> f64 {
        self.lambda * self.true_gain()
    }

    /// Increment of `f⁺` when one true assertion is learned.
    pub fn true_step(&self) -> f64 {
        pool_step(self.phi * self.n_assertions as f64)
    }

    /// Increment of `f⁻` when one false assertion is learned.
    pub fn false_step(&self) -> f64 {
        pool_step((1.0 - self.phi) * self.n_assertions as f64)
    }

    /// Knowledge implied by the known assertion mass alone,
    /// `(φf⁺ + λ(1−φ)f⁻) / Z`.
    pub fn mass_knowledge(&self, f_plus: f64, f_minus: f64) -> f64 {
        let z = self.knowledge_norm();
        if z > 0.0 {
            ((self.phi * f_plus + self.lambda * (1.0 - self.phi) * f_minus) / z).min(1.0)
        } else {
            1.0
        }
    }
}

fn pool_step(pool: f64) -> f64 {
    if pool > 0.0 {
        1.0 / pool
    } else {
        1.0
    }
}

/// Personality weights: desire for knowledge, reputation and popularity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraitVector {
    pub kappa: f64,
    pub rho: f64,
    pub pi: f64,
}

impl TraitVector {
    /// "Internet troll" community.
    pub const TROLL: TraitVector = TraitVector {
        kappa: 0.1,
        rho: 0.1,
        pi: 0.8,
    };
    /// "Internet expert" community.
    pub const EXPERT: TraitVector = TraitVector {
        kappa: 0.2,
        rho: 0.7,
        pi: 0.1,
    };

    pub fn new(kappa: f64, rho: f64, pi: f64) -> Result<Self> {
        let t = Self { kappa, rho, pi };
        t.validate()?;
        Ok(t)
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "troll" => Some(Self::TROLL),
            "expert" => Some(Self::EXPERT),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("kappa", self.kappa)?;
        check_unit("rho", self.rho)?;
        check_unit("pi", self.pi)?;
        let sum = self.kappa + self.rho + self.pi;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "traits",
                format!("kappa + rho + pi must equal 1 within 1e-12, got {sum}"),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        GlobalParams::default().validate().unwrap();
        TraitVector::TROLL.validate().unwrap();
        TraitVector::EXPERT.validate().unwrap();
    }

    #[test]
    fn knowledge_constants() {
        let p = GlobalParams::default();
        assert!((p.knowledge_norm() - 0.9).abs() < 1e-15);
        assert!((p.true_gain() - 1.0 / 1800.0).abs() < 1e-18);
        assert!((p.false_gain() - 0.5 / 1800.0).abs() < 1e-18);
        assert!((p.true_step() - 1.0 / 1600.0).abs() < 1e-18);
        assert!((p.false_step() - 1.0 / 400.0).abs() < 1e-18);
        assert_eq!(p.mass_knowledge(1.0, 1.0), 1.0);
        assert!((p.mass_knowledge(0.1, 0.1) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range() {
        let p = GlobalParams {
            phi: 1.5,
            ..Default::default()
        };
        match p.validate() {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "phi"),
            other => panic!("unexpected {other:?}"),
        }
        let p = GlobalParams {
            gamma_r: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = GlobalParams {
            n_assertions: 0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        assert!(TraitVector::new(0.5, 0.5, 0.5).is_err());
        assert!(TraitVector::new(-0.1, 0.6, 0.5).is_err());
    }
}
