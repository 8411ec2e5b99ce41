//! Utility and the expected-payoff bimatrix of a two-actor game.

use serde::{Deserialize, Serialize};

use crate::actor::{Actor, ActorState};
use crate::error::{Error, Result};
use crate::params::{GlobalParams, TraitVector};
use crate::strategy::Strategy;
use crate::update::{self, Acts};

/// `U = κk + ρr + πp`.
pub fn utility(state: &ActorState, traits: &TraitVector) -> f64 {
    traits.kappa * state.k + traits.rho * state.r + traits.pi * state.p
}

/// Probability that an assertion sent by this actor is true, or `None` when
/// the actor knows nothing and so cannot send.
pub fn truthfulness(state: &ActorState, params: &GlobalParams) -> Option<f64> {
    update::truthfulness(state, params)
}

/// Change of each state component for one actor, plus effort spent.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Deltas {
    pub knowledge: f64,
    pub reputation: f64,
    pub popularity: f64,
    pub effort: f64,
}

impl Deltas {
    /// `κΔk + ρΔr + πΔp − effort`.
    pub fn utility_change(&self, traits: &TraitVector) -> f64 {
        traits.kappa * self.knowledge + traits.rho * self.reputation + traits.pi * self.popularity - self.effort
    }
}

/// Expected component changes for both players of one strategy pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedDeltas {
    pub a: Deltas,
    pub b: Deltas,
    pub du_a: f64,
    pub du_b: f64,
}

/// One participant's view of a resolved game.
#[derive(Clone, Copy)]
struct Side<'a> {
    actor: &'a Actor,
    truth: Option<f64>,
    sends: bool,
    comments: bool,
}

/// Expected effect of a game on `me`. Written once and used for each side so
/// that swapping the actors swaps the result exactly.
fn expected_side(me: Side<'_>, other: Side<'_>, params: &GlobalParams) -> Deltas {
    let state = &me.actor.state;
    let mut knowledge = 0.0;
    if other.sends {
        let t = other.truth.unwrap_or(0.0);
        let gain_true = update::knowledge_after(state, true, params) - state.k;
        let gain_false = update::knowledge_after(state, false, params) - state.k;
        knowledge =
            t * update::novelty(state, true) * gain_true + (1.0 - t) * update::novelty(state, false) * gain_false;
    }
    let mut reputation = 0.0;
    if me.sends && other.comments {
        let t = me.truth.unwrap_or(0.0);
        let up = update::reputation_after(state.r, true, params) - state.r;
        let down = update::reputation_after(state.r, false, params) - state.r;
        reputation = t * up + (1.0 - t) * down;
    }
    let acts = me.sends as u32 + me.comments as u32;
    let popularity = update::popularity_after(state.p, acts, params) - state.p;
    Deltas {
        knowledge,
        reputation,
        popularity,
        effort: update::effort(me.sends, me.comments, params),
    }
}

/// Expected utility changes when `a` plays `s_a` and `b` plays `s_b`.
///
/// Feedback bits that cannot take effect (the opponent does not send, or is
/// inactive) are dropped before anything is computed, so pairs that differ
/// only in a moot bit produce bit-identical results.
pub fn expected_deltas(a: &Actor, b: &Actor, s_a: Strategy, s_b: Strategy, params: &GlobalParams) -> ExpectedDeltas {
    let t_a = update::truthfulness(&a.state, params);
    let t_b = update::truthfulness(&b.state, params);
    let acts = Acts::resolve(s_a, s_b, t_a.is_some(), t_b.is_some());
    let side_a = Side {
        actor: a,
        truth: t_a,
        sends: acts.a_sends,
        comments: acts.a_feedback,
    };
    let side_b = Side {
        actor: b,
        truth: t_b,
        sends: acts.b_sends,
        comments: acts.b_feedback,
    };
    let da = expected_side(side_a, side_b, params);
    let db = expected_side(side_b, side_a, params);
    ExpectedDeltas {
        a: da,
        b: db,
        du_a: da.utility_change(&a.traits),
        du_b: db.utility_change(&b.traits),
    }
}

/// Which game two actors play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Both actors choose among S0..S3.
    #[default]
    Duplex,
    /// The row actor speaks (hold or send), the column actor listens
    /// (no feedback or feedback).
    OneWay,
}

impl Mode {
    pub fn size(self) -> usize {
        match self {
            Mode::Duplex => 4,
            Mode::OneWay => 2,
        }
    }

    /// Full-duplex strategy played by the row actor for row `i`.
    pub fn row_strategy(self, i: usize) -> Strategy {
        match self {
            Mode::Duplex => Strategy::ALL[i],
            Mode::OneWay => Strategy::from_bits(i == 1, false),
        }
    }

    /// Full-duplex strategy played by the column actor for column `j`.
    pub fn col_strategy(self, j: usize) -> Strategy {
        match self {
            Mode::Duplex => Strategy::ALL[j],
            Mode::OneWay => Strategy::from_bits(false, j == 1),
        }
    }
}

/// Rectangular bimatrix game stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    rows: usize,
    cols: usize,
    row_payoffs: Vec<f64>,
    col_payoffs: Vec<f64>,
}

impl PayoffMatrix {
    pub fn new(rows: usize, cols: usize, row_payoffs: Vec<f64>, col_payoffs: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch {
                expected: "at least 1x1".into(),
                found: format!("{rows}x{cols}"),
            });
        }
        for (name, v) in [("row_payoffs", &row_payoffs), ("col_payoffs", &col_payoffs)] {
            if v.len() != rows * cols {
                return Err(Error::DimensionMismatch {
                    expected: format!("{} entries in {name}", rows * cols),
                    found: v.len().to_string(),
                });
            }
            if let Some(x) = v.iter().find(|x| !x.is_finite()) {
                return Err(Error::invalid(name, format!("entries must be finite, got {x}")));
            }
        }
        Ok(Self {
            rows,
            cols,
            row_payoffs,
            col_payoffs,
        })
    }

    /// Builds a game from nested `[row][col]` grids.
    pub fn from_grids(row_payoffs: &[Vec<f64>], col_payoffs: &[Vec<f64>]) -> Result<Self> {
        let rows = row_payoffs.len();
        let cols = row_payoffs.first().map_or(0, Vec::len);
        if col_payoffs.len() != rows {
            return Err(Error::DimensionMismatch {
                expected: format!("{rows} rows in col_payoffs"),
                found: col_payoffs.len().to_string(),
            });
        }
        let flatten = |g: &[Vec<f64>], name: &str| -> Result<Vec<f64>> {
            let mut out = Vec::with_capacity(rows * cols);
            for (i, row) in g.iter().enumerate() {
                if row.len() != cols {
                    return Err(Error::DimensionMismatch {
                        expected: format!("{cols} columns in {name}[{i}]"),
                        found: row.len().to_string(),
                    });
                }
                out.extend_from_slice(row);
            }
            Ok(out)
        };
        let r = flatten(row_payoffs, "row_payoffs")?;
        let c = flatten(col_payoffs, "col_payoffs")?;
        Self::new(rows, cols, r, c)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_payoff(&self, i: usize, j: usize) -> f64 {
        self.row_payoffs[i * self.cols + j]
    }

    pub fn col_payoff(&self, i: usize, j: usize) -> f64 {
        self.col_payoffs[i * self.cols + j]
    }

    /// `(row player, column player)` payoffs of cell `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> (f64, f64) {
        (self.row_payoff(i, j), self.col_payoff(i, j))
    }

    pub fn row_grid(&self) -> Vec<Vec<f64>> {
        self.row_payoffs.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn col_grid(&self) -> Vec<Vec<f64>> {
        self.col_payoffs.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    /// Adds `c` to every payoff of the row player.
    pub fn shift_row(&mut self, c: f64) {
        self.row_payoffs.iter_mut().for_each(|x| *x += c);
    }

    /// Adds `c` to every payoff of the column player.
    pub fn shift_col(&mut self, c: f64) {
        self.col_payoffs.iter_mut().for_each(|x| *x += c);
    }

    /// The game seen from the other side: players swap roles.
    pub fn transposed(&self) -> Self {
        let mut row = Vec::with_capacity(self.rows * self.cols);
        let mut col = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                row.push(self.col_payoff(i, j));
                col.push(self.row_payoff(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            row_payoffs: row,
            col_payoffs: col,
        }
    }
}

/// Expected-payoff matrix of a game between `a` (rows) and `b` (columns).
pub fn build_matrix(a: &Actor, b: &Actor, params: &GlobalParams, mode: Mode) -> PayoffMatrix {
    let n = mode.size();
    let mut row = Vec::with_capacity(n * n);
    let mut col = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let d = expected_deltas(a, b, mode.row_strategy(i), mode.col_strategy(j), params);
            row.push(d.du_a);
            col.push(d.du_b);
        }
    }
    PayoffMatrix {
        rows: n,
        cols: n,
        row_payoffs: row,
        col_payoffs: col,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::KnowledgeRule;

    fn actor(k: f64, r: f64, p: f64, fp: f64, fm: f64, traits: TraitVector) -> Actor {
        Actor::new(ActorState::new(k, r, p, fp, fm).unwrap(), traits)
    }

    #[test]
    fn utility_examples() {
        let s = ActorState::new(0.5, 0.5, 0.5, 0.3, 0.2).unwrap();
        assert!((utility(&s, &TraitVector::TROLL) - 0.5).abs() < 1e-15);
        assert!((utility(&s, &TraitVector::EXPERT) - 0.5).abs() < 1e-15);
        let s = ActorState::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(utility(&s, &TraitVector::EXPERT), 0.2);
        // 0.1*0.9 + 0.1*0.3 + 0.8*0.6 = 0.09 + 0.03 + 0.48
        let s = ActorState::new(0.9, 0.3, 0.6, 0.0, 0.0).unwrap();
        assert!((utility(&s, &TraitVector::TROLL) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn utility_isolates_each_weight() {
        let s = ActorState::new(0.37, 0.61, 0.19, 0.5, 0.5).unwrap();
        assert_eq!(utility(&s, &TraitVector::new(1.0, 0.0, 0.0).unwrap()), s.k);
        assert_eq!(utility(&s, &TraitVector::new(0.0, 1.0, 0.0).unwrap()), s.r);
        assert_eq!(utility(&s, &TraitVector::new(0.0, 0.0, 1.0).unwrap()), s.p);
    }

    #[test]
    fn truthfulness_examples() {
        let p = GlobalParams::default();
        let s = ActorState::new(0.5, 0.5, 0.5, 0.0, 0.0).unwrap();
        assert_eq!(truthfulness(&s, &p), None);
        let s = ActorState::new(0.5, 0.5, 0.5, 0.4, 0.4).unwrap();
        assert!((truthfulness(&s, &p).unwrap() - 0.8).abs() < 1e-15);
        let s = ActorState::new(0.5, 0.5, 0.5, 0.5, 0.25).unwrap();
        assert!((truthfulness(&s, &p).unwrap() - 0.4 / 0.45).abs() < 1e-15);
    }

    #[test]
    fn silence_only_decays() {
        let p = GlobalParams::default();
        let a = actor(0.3, 0.4, 0.6, 0.5, 0.2, TraitVector::TROLL);
        let b = actor(0.7, 0.2, 0.3, 0.1, 0.4, TraitVector::EXPERT);
        let d = expected_deltas(&a, &b, Strategy::S0, Strategy::S0, &p);
        assert_eq!(d.a.knowledge, 0.0);
        assert_eq!(d.a.reputation, 0.0);
        assert_eq!(d.a.effort, 0.0);
        assert!((d.a.popularity + p.delta * 0.6).abs() < 1e-15);
        assert!((d.b.popularity + p.delta * 0.3).abs() < 1e-15);
    }

    #[test]
    fn inactive_sender_is_silent() {
        let p = GlobalParams::default();
        let a = actor(0.3, 0.4, 0.6, 0.0, 0.0, TraitVector::TROLL);
        let b = actor(0.7, 0.2, 0.3, 0.1, 0.4, TraitVector::EXPERT);
        assert_eq!(
            expected_deltas(&a, &b, Strategy::S2, Strategy::S0, &p),
            expected_deltas(&a, &b, Strategy::S0, Strategy::S0, &p)
        );
    }

    fn example_pair(rule: KnowledgeRule) -> (Actor, Actor, GlobalParams) {
        let params = GlobalParams {
            cost_send: 0.005,
            cost_feedback: 0.005,
            knowledge_rule: rule,
            ..Default::default()
        };
        // b's k equals its mass knowledge (0.1), where both knowledge rules agree.
        let a = actor(0.5, 0.5, 0.5, 0.5, 0.25, TraitVector::EXPERT);
        let b = actor(0.1, 0.5, 0.5, 0.1, 0.1, TraitVector::EXPERT);
        (a, b, params)
    }

    #[test]
    fn hand_computed_example() {
        // t_a = 0.4/0.45; Δr_a = 0.1(t·0.5 − (1−t)·0.5);
        // Δk_b = t·0.9/1800 + (1−t)·0.9·0.5/1800.
        let t: f64 = 0.4 / 0.45;
        let dr: f64 = 0.1 * (t * 0.5 - (1.0 - t) * 0.5);
        let dk = t * 0.9 / 1800.0 + (1.0 - t) * 0.9 * 0.5 / 1800.0;
        assert!((dr - 0.038_888_9).abs() < 1e-7);
        assert!((dk - 4.7222e-4).abs() < 1e-8);
        for rule in [KnowledgeRule::Fixed, KnowledgeRule::Proportional] {
            let (a, b, params) = example_pair(rule);
            let d = expected_deltas(&a, &b, Strategy::S2, Strategy::S1, &params);
            assert!((d.a.reputation - dr).abs() < 1e-15, "{rule:?}");
            assert!((d.b.knowledge - dk).abs() < 1e-15, "{rule:?}");
            assert_eq!(d.a.knowledge, 0.0);
            assert_eq!(d.a.effort, 0.005);
            assert_eq!(d.b.effort, 0.005);
            let m = build_matrix(&a, &b, &params, Mode::Duplex);
            assert_eq!(m.entry(2, 1), (d.du_a, d.du_b));
        }
    }

    #[test]
    fn fixed_rule_ignores_k_below_clamp() {
        let (a, mut b, params) = example_pair(KnowledgeRule::Fixed);
        b.state.k = 0.6;
        let d = expected_deltas(&a, &b, Strategy::S2, Strategy::S1, &params);
        let t = 0.4 / 0.45;
        let dk = t * 0.9 / 1800.0 + (1.0 - t) * 0.9 * 0.5 / 1800.0;
        assert!((d.b.knowledge - dk).abs() < 1e-12);
    }

    #[test]
    fn one_way_is_a_duplex_submatrix() {
        let p = GlobalParams::default();
        let a = actor(0.3, 0.4, 0.6, 0.5, 0.2, TraitVector::TROLL);
        let b = actor(0.7, 0.2, 0.3, 0.1, 0.4, TraitVector::TROLL);
        let d = build_matrix(&a, &b, &p, Mode::Duplex);
        let o = build_matrix(&a, &b, &p, Mode::OneWay);
        assert_eq!((o.rows(), o.cols()), (2, 2));
        for (oi, di) in [(0, 0), (1, 2)] {
            for (oj, dj) in [(0, 0), (1, 1)] {
                assert_eq!(o.entry(oi, oj), d.entry(di, dj));
            }
        }
    }

    #[test]
    fn transpose_swaps_roles() {
        let m = PayoffMatrix::from_grids(
            &[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]],
            &[vec![7.0, 8.0, 9.0], vec![10.0, 11.0, 12.0]],
        )
        .unwrap();
        let t = m.transposed();
        assert_eq!((t.rows(), t.cols()), (3, 2));
        assert_eq!(t.entry(2, 1), (12.0, 6.0));
    }

    #[test]
    fn matrix_rejects_bad_shapes() {
        assert!(PayoffMatrix::new(2, 2, vec![0.0; 3], vec![0.0; 4]).is_err());
        assert!(PayoffMatrix::new(0, 2, vec![], vec![]).is_err());
        assert!(PayoffMatrix::from_grids(&[vec![1.0], vec![1.0, 2.0]], &[vec![1.0], vec![1.0]]).is_err());
        assert!(PayoffMatrix::new(1, 1, vec![f64::NAN], vec![0.0]).is_err());
    }
}
