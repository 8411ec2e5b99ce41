//! Sampling one concrete interaction for a pure strategy pair.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::actor::{Actor, ActorState};
use crate::params::GlobalParams;
use crate::payoff::Deltas;
use crate::strategy::Strategy;
use crate::update::{self, Acts};

/// What happened along one direction (sender to receiver).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DirectionRecord {
    pub active: bool,
    pub assertion_true: bool,
    pub new_to_receiver: bool,
    /// The receiver commented on the assertion.
    pub feedback_sent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionOutcome {
    pub a_to_b: DirectionRecord,
    pub b_to_a: DirectionRecord,
    pub deltas_a: Deltas,
    pub deltas_b: Deltas,
    pub du_a: f64,
    pub du_b: f64,
}

fn sample_direction<R: Rng + ?Sized>(
    active: bool,
    truth: Option<f64>,
    receiver: &ActorState,
    feedback: bool,
    rng: &mut R,
) -> DirectionRecord {
    if !active {
        return DirectionRecord::default();
    }
    let t = truth.unwrap_or(0.0);
    let assertion_true = rng.gen::<f64>() < t;
    let new_to_receiver = rng.gen::<f64>() < update::novelty(receiver, assertion_true);
    DirectionRecord {
        active,
        assertion_true,
        new_to_receiver,
        feedback_sent: feedback,
    }
}

/// New state of `me` after the game, computed from pre-game states only.
fn next_state(
    me: &ActorState,
    incoming: &DirectionRecord,
    outgoing: &DirectionRecord,
    comments: bool,
    params: &GlobalParams,
) -> ActorState {
    let mut next = *me;
    if incoming.active && incoming.new_to_receiver {
        next.k = update::knowledge_after(me, incoming.assertion_true, params);
        (next.f_plus, next.f_minus) = update::pools_after(me, incoming.assertion_true, params);
    }
    if outgoing.active && outgoing.feedback_sent {
        next.r = update::reputation_after(me.r, outgoing.assertion_true, params);
    }
    let acts = outgoing.active as u32 + comments as u32;
    next.p = update::popularity_after(me.p, acts, params);
    next
}

fn diff(before: &ActorState, after: &ActorState, effort: f64) -> Deltas {
    Deltas {
        knowledge: after.k - before.k,
        reputation: after.r - before.r,
        popularity: after.p - before.p,
        effort,
    }
}

/// Plays the pure pair `(s_a, s_b)` once, updating both actors in place.
///
/// Each active direction draws two uniforms from `rng`, first the truth of the
/// assertion and then whether the receiver already knows it; `a → b` is drawn
/// before `b → a`.
pub fn realize_outcome<R: Rng + ?Sized>(
    a: &mut Actor,
    b: &mut Actor,
    s_a: Strategy,
    s_b: Strategy,
    params: &GlobalParams,
    rng: &mut R,
) -> InteractionOutcome {
    let t_a = update::truthfulness(&a.state, params);
    let t_b = update::truthfulness(&b.state, params);
    let acts = Acts::resolve(s_a, s_b, t_a.is_some(), t_b.is_some());

    let a_to_b = sample_direction(acts.a_sends, t_a, &b.state, acts.b_feedback, rng);
    let b_to_a = sample_direction(acts.b_sends, t_b, &a.state, acts.a_feedback, rng);

    let before_a = a.state;
    let before_b = b.state;
    a.state = next_state(&before_a, &b_to_a, &a_to_b, acts.a_feedback, params);
    b.state = next_state(&before_b, &a_to_b, &b_to_a, acts.b_feedback, params);

    let deltas_a = diff(
        &before_a,
        &a.state,
        update::effort(acts.a_sends, acts.a_feedback, params),
    );
    let deltas_b = diff(
        &before_b,
        &b.state,
        update::effort(acts.b_sends, acts.b_feedback, params),
    );
    InteractionOutcome {
        a_to_b,
        b_to_a,
        deltas_a,
        deltas_b,
        du_a: deltas_a.utility_change(&a.traits),
        du_b: deltas_b.utility_change(&b.traits),
    }
}
