//! Game-theoretic model of two-way information dissemination.
//!
//! Two actors meet and each decides whether to send an assertion and whether
//! to comment on the one it receives. Payoffs come from changes in
//! self-perceived knowledge, reputation and popularity, weighted by each
//! actor's personality. On top of the two-player game the crate provides a
//! population simulator and a network-emergence experiment.

pub mod actor;
pub mod emergence;
pub mod engine;
pub mod error;
pub mod nash;
pub mod outcome;
pub mod params;
pub mod payoff;
pub mod rng;
pub mod strategy;
mod update;

pub use actor::{Actor, ActorState};
pub use error::{Error, Result};
pub use nash::{EquilibriumProfile, MixedStrategy, SelectionRule};
pub use outcome::{realize_outcome, DirectionRecord, InteractionOutcome};
pub use params::{GlobalParams, KnowledgeRule, TraitVector};
pub use payoff::{build_matrix, expected_deltas, truthfulness, utility, Deltas, ExpectedDeltas, Mode, PayoffMatrix};
pub use strategy::Strategy;
