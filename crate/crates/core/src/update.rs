//! State transition primitives shared by the expected-payoff construction and
//! the sampled realization, so both follow the same arithmetic.

use crate::actor::ActorState;
use crate::params::{GlobalParams, KnowledgeRule};
use crate::strategy::Strategy;

/// Visible acts that actually happen once moot choices are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Acts {
    pub a_sends: bool,
    pub b_sends: bool,
    pub a_feedback: bool,
    pub b_feedback: bool,
}

impl Acts {
    /// An inactive sender cannot send, and feedback needs an incoming
    /// assertion.
    pub fn resolve(s_a: Strategy, s_b: Strategy, a_active: bool, b_active: bool) -> Self {
        let a_sends = s_a.sends() && a_active;
        let b_sends = s_b.sends() && b_active;
        Self {
            a_sends,
            b_sends,
            a_feedback: s_a.gives_feedback() && b_sends,
            b_feedback: s_b.gives_feedback() && a_sends,
        }
    }
}

/// Truthfulness of an assertion drawn uniformly from the known mass, or
/// `None` when nothing is known.
pub(crate) fn truthfulness(state: &ActorState, params: &GlobalParams) -> Option<f64> {
    let known_true = params.phi * state.f_plus;
    let mass = known_true + (1.0 - params.phi) * state.f_minus;
    if mass > 0.0 {
        Some((known_true / mass).min(1.0))
    } else {
        None
    }
}

/// `k` after the receiver learns one new assertion.
pub(crate) fn knowledge_after(state: &ActorState, truthful: bool, params: &GlobalParams) -> f64 {
    let gain = if truthful {
        params.true_gain()
    } else {
        params.false_gain()
    };
    let k = state.k;
    let next = match params.knowledge_rule {
        KnowledgeRule::Fixed => k + gain,
        KnowledgeRule::Proportional => {
            let remaining = 1.0 - params.mass_knowledge(state.f_plus, state.f_minus);
            if remaining <= gain {
                1.0
            } else {
                k + (1.0 - k) * (gain / remaining)
            }
        }
    };
    next.min(1.0)
}

/// `(f⁺, f⁻)` after learning one new assertion.
pub(crate) fn pools_after(state: &ActorState, truthful: bool, params: &GlobalParams) -> (f64, f64) {
    if truthful {
        ((state.f_plus + params.true_step()).min(1.0), state.f_minus)
    } else {
        (state.f_plus, (state.f_minus + params.false_step()).min(1.0))
    }
}

/// Probability that an assertion of the given truth is new to the receiver.
pub(crate) fn novelty(state: &ActorState, truthful: bool) -> f64 {
    if truthful {
        1.0 - state.f_plus
    } else {
        1.0 - state.f_minus
    }
}

pub(crate) fn reputation_after(r: f64, truthful: bool, params: &GlobalParams) -> f64 {
    if truthful {
        r + params.gamma_r * (1.0 - r)
    } else {
        r - params.gamma_r * r
    }
}

/// Decay once, then move toward 1 by `gamma_p` per visible act.
pub(crate) fn popularity_after(p: f64, acts: u32, params: &GlobalParams) -> f64 {
    let mut p = (1.0 - params.delta) * p;
    for _ in 0..acts {
        p += params.gamma_p * (1.0 - p);
    }
    p
}

pub(crate) fn effort(sends: bool, feedback: bool, params: &GlobalParams) -> f64 {
    let mut cost = 0.0;
    if sends {
        cost += params.cost_send;
    }
    if feedback {
        cost += params.cost_feedback;
    }
    cost
}
