//! Population-scale dissemination: random pairs of actors play the game in
//! discrete time while the distribution of knowledge is tracked.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::actor::{Actor, ActorState};
use crate::error::{Error, Result};
use crate::nash::{self, EquilibriumProfile, SelectionRule, VERIFY_TOL};
use crate::outcome::{realize_outcome, InteractionOutcome};
use crate::params::{GlobalParams, TraitVector};
use crate::payoff::{build_matrix, Mode};
use crate::rng::{seeded, SimRng};
use crate::strategy::Strategy;

/// How players pick their pure strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlayPolicy {
    /// Solve the game and sample a pure pair from the selected equilibrium.
    #[default]
    Equilibrium,
    /// Always play the given full-duplex strategies.
    Forced { row: Strategy, col: Strategy },
}

/// Everything needed to play one game between two actors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameRules {
    pub params: GlobalParams,
    pub mode: Mode,
    pub selection: SelectionRule,
    pub policy: PlayPolicy,
}

impl Default for GameRules {
    fn default() -> Self {
        Self {
            params: GlobalParams::default(),
            mode: Mode::Duplex,
            selection: SelectionRule::Welfare,
            policy: PlayPolicy::Equilibrium,
        }
    }
}

/// Result of one played game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameRecord {
    pub row_strategy: Strategy,
    pub col_strategy: Strategy,
    /// The selected equilibrium; `None` under a forced policy.
    pub profile: Option<EquilibriumProfile>,
    pub outcome: InteractionOutcome,
}

impl GameRules {
    /// Solves the game between `a` (row) and `b` (column), samples a pure pair
    /// and applies it. Draws two uniforms for the pure pair (row first) before
    /// the outcome draws.
    pub fn play<R: Rng + ?Sized>(&self, a: &mut Actor, b: &mut Actor, rng: &mut R) -> Result<GameRecord> {
        let (row_strategy, col_strategy, profile) = match self.policy {
            PlayPolicy::Forced { row, col } => (row, col, None),
            PlayPolicy::Equilibrium => {
                let m = build_matrix(a, b, &self.params, self.mode);
                let profile = nash::solve(&m, VERIFY_TOL, self.selection)?;
                let i = profile.sigma_row.sample_index(rng.gen());
                let j = profile.sigma_col.sample_index(rng.gen());
                (self.mode.row_strategy(i), self.mode.col_strategy(j), Some(profile))
            }
        };
        let outcome = realize_outcome(a, b, row_strategy, col_strategy, &self.params, rng);
        Ok(GameRecord {
            row_strategy,
            col_strategy,
            profile,
            outcome,
        })
    }
}

/// A group of actors sharing an initial knowledge value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cohort {
    pub fraction: f64,
    pub k: f64,
}

impl Cohort {
    /// Ignoramuses, Mediocres and Gurus in equal thirds.
    pub fn thirds() -> Vec<Cohort> {
        [0.1, 0.5, 0.9]
            .into_iter()
            .map(|k| Cohort { fraction: 1.0 / 3.0, k })
            .collect()
    }
}

/// Upper bounds of the uniform initial draws; lower bounds are 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitBounds {
    pub r_max: f64,
    pub p_max: f64,
    pub f_plus_max: f64,
    pub f_minus_max: f64,
}

impl Default for InitBounds {
    fn default() -> Self {
        Self {
            r_max: 1.0,
            p_max: 1.0,
            f_plus_max: 1.0,
            f_minus_max: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSpec {
    pub n_actors: usize,
    pub traits: TraitVector,
    pub cohorts: Vec<Cohort>,
    pub bounds: InitBounds,
    pub rules: GameRules,
    pub seed: u64,
    /// Communications credited per game, divided by `n_actors` to get time.
    /// Each game is a communication for both participants, hence 2.
    pub time_scale: f64,
}

impl Default for PopulationSpec {
    fn default() -> Self {
        Self {
            n_actors: 1000,
            traits: TraitVector::TROLL,
            cohorts: Cohort::thirds(),
            bounds: InitBounds::default(),
            rules: GameRules::default(),
            seed: 0,
            time_scale: 2.0,
        }
    }
}

impl PopulationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_actors < 2 {
            return Err(Error::PopulationTooSmall(self.n_actors));
        }
        self.traits.validate()?;
        self.rules.params.validate()?;
        if self.cohorts.is_empty() {
            return Err(Error::invalid("cohorts", "at least one cohort is required"));
        }
        for c in &self.cohorts {
            if !(0.0..=1.0).contains(&c.fraction) || !(0.0..=1.0).contains(&c.k) {
                return Err(Error::invalid(
                    "cohorts",
                    format!("fraction and k must lie in [0, 1], got ({}, {})", c.fraction, c.k),
                ));
            }
        }
        let total: f64 = self.cohorts.iter().map(|c| c.fraction).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(
                "cohorts",
                format!("fractions must sum to 1, got {total}"),
            ));
        }
        for (name, v) in [
            ("bounds.r_max", self.bounds.r_max),
            ("bounds.p_max", self.bounds.p_max),
            ("bounds.f_plus_max", self.bounds.f_plus_max),
            ("bounds.f_minus_max", self.bounds.f_minus_max),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(name, format!("must lie in [0, 1], got {v}")));
            }
        }
        if !(self.time_scale > 0.0 && self.time_scale.is_finite()) {
            return Err(Error::invalid("time_scale", "must be a finite value > 0"));
        }
        Ok(())
    }

    /// Actors per cohort by largest remainder; ties go to the earlier cohort.
    pub fn cohort_sizes(&self) -> Vec<usize> {
        let n = self.n_actors;
        let quotas: Vec<f64> = self.cohorts.iter().map(|c| c.fraction * n as f64).collect();
        let mut sizes: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
        let assigned: usize = sizes.iter().sum();
        let mut order: Vec<usize> = (0..quotas.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = quotas[a] - quotas[a].floor();
            let rb = quotas[b] - quotas[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &i in order.iter().cycle().take(n.saturating_sub(assigned)) {
            sizes[i] += 1;
        }
        sizes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub actors: Vec<Actor>,
    /// Games each actor has taken part in.
    pub communications: Vec<u64>,
    pub games: u64,
}

impl Population {
    pub fn len(&self) -> usize {
        self.actors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actors.is_empty()
    }

    pub fn mean_k(&self) -> f64 {
        self.actors.iter().map(|a| a.state.k).sum::<f64>() / self.actors.len() as f64
    }
}

fn populate(spec: &PopulationSpec, rng: &mut SimRng) -> Result<Population> {
    spec.validate()?;
    let b = spec.bounds;
    let mut actors = Vec::with_capacity(spec.n_actors);
    for (cohort, size) in spec.cohorts.iter().zip(spec.cohort_sizes()) {
        for _ in 0..size {
            let r = rng.gen::<f64>() * b.r_max;
            let p = rng.gen::<f64>() * b.p_max;
            let f_plus = rng.gen::<f64>() * b.f_plus_max;
            let f_minus = rng.gen::<f64>() * b.f_minus_max;
            let state = ActorState::new(cohort.k, r, p, f_plus, f_minus)?;
            actors.push(Actor::new(state, spec.traits));
        }
    }
    Ok(Population {
        communications: vec![0; actors.len()],
        actors,
        games: 0,
    })
}

/// Builds the initial population from the spec's seed. Identical to the
/// population a [`Simulation`] starts from.
pub fn init_population(spec: &PopulationSpec) -> Result<Population> {
    populate(spec, &mut seeded(spec.seed))
}

/// One game between a uniformly drawn ordered pair of distinct actors.
#[derive(Debug, Clone, PartialEq)]
pub struct StepEvent {
    /// Row player; the speaker in one-way mode.
    pub speaker: usize,
    pub partner: usize,
    pub game: GameRecord,
}

pub fn step<R: Rng + ?Sized>(population: &mut Population, rules: &GameRules, rng: &mut R) -> Result<StepEvent> {
    let n = population.len();
    if n < 2 {
        return Err(Error::PopulationTooSmall(n));
    }
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let (a, b) = pair_mut(&mut population.actors, i, j);
    let game = rules.play(a, b, rng)?;
    population.communications[i] += 1;
    population.communications[j] += 1;
    population.games += 1;
    Ok(StepEvent {
        speaker: i,
        partner: j,
        game,
    })
}

/// Mutable references to two distinct elements.
pub(crate) fn pair_mut<T>(v: &mut [T], i: usize, j: usize) -> (&mut T, &mut T) {
    assert_ne!(i, j);
    if i < j {
        let (lo, hi) = v.split_at_mut(j);
        (&mut lo[i], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(i);
        (&mut hi[0], &mut lo[j])
    }
}

/// Distribution of `k` over the population at one point in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeHistogram {
    /// Average communications per actor so far.
    pub time: f64,
    pub games: u64,
    pub mean_k: f64,
    /// `counts.len() + 1` uniform edges over `[0, 1]`.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl KnowledgeHistogram {
    pub fn from_population(population: &Population, time: f64, n_bins: usize) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::ZeroBins);
        }
        let mut counts = vec![0; n_bins];
        for a in &population.actors {
            let bin = ((a.state.k * n_bins as f64) as usize).min(n_bins - 1);
            counts[bin] += 1;
        }
        Ok(Self {
            time,
            games: population.games,
            mean_k: population.mean_k(),
            edges: (0..=n_bins).map(|i| i as f64 / n_bins as f64).collect(),
            counts,
        })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// A dissemination run owning its population and random stream.
#[derive(Debug, Clone)]
pub struct Simulation {
    spec: PopulationSpec,
    initial: Vec<ActorState>,
    population: Population,
    rng: SimRng,
}

impl Simulation {
    /// The stream seeded from `spec.seed` first draws the population, then
    /// drives every game.
    pub fn new(spec: PopulationSpec) -> Result<Self> {
        let mut rng = seeded(spec.seed);
        let population = populate(&spec, &mut rng)?;
        Ok(Self {
            initial: population.actors.iter().map(|a| a.state).collect(),
            spec,
            population,
            rng,
        })
    }

    pub fn spec(&self) -> &PopulationSpec {
        &self.spec
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn initial_states(&self) -> &[ActorState] {
        &self.initial
    }

    pub fn time(&self) -> f64 {
        self.spec.time_scale * self.population.games as f64 / self.population.len() as f64
    }

    pub fn step(&mut self) -> Result<StepEvent> {
        step(&mut self.population, &self.spec.rules, &mut self.rng)
    }

    pub fn snapshot(&self, n_bins: usize) -> Result<KnowledgeHistogram> {
        KnowledgeHistogram::from_population(&self.population, self.time(), n_bins)
    }

    /// Plays `total_games` games, snapshotting before the first game, every
    /// `snapshot_interval` games and after the last one.
    pub fn run(
        &mut self,
        total_games: u64,
        snapshot_interval: u64,
        n_bins: usize,
        mut on_event: impl FnMut(&StepEvent),
    ) -> Result<Vec<KnowledgeHistogram>> {
        if n_bins == 0 {
            return Err(Error::ZeroBins);
        }
        if snapshot_interval == 0 {
            return Err(Error::invalid("snapshot_interval", "must be >= 1"));
        }
        let mut series = vec![self.snapshot(n_bins)?];
        for g in 1..=total_games {
            let ev = self.step()?;
            on_event(&ev);
            if g % snapshot_interval == 0 || g == total_games {
                series.push(self.snapshot(n_bins)?);
            }
        }
        Ok(series)
    }
}

/// Runs a fresh simulation and returns its histogram series.
pub fn run_dissemination(
    spec: &PopulationSpec,
    total_games: u64,
    snapshot_interval: u64,
    n_bins: usize,
) -> Result<Vec<KnowledgeHistogram>> {
    Simulation::new(spec.clone())?.run(total_games, snapshot_interval, n_bins, |_| {})
}

/// Time of the first snapshot whose mean `k` reaches `threshold`.
pub fn time_to_threshold(series: &[KnowledgeHistogram], threshold: f64) -> Option<f64> {
    series.iter().find(|h| h.mean_k >= threshold).map(|h| h.time)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec(n: usize, seed: u64) -> PopulationSpec {
        PopulationSpec {
            n_actors: n,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn cohorts_split_into_thirds() {
        let spec = small_spec(999, 7);
        let pop = init_population(&spec).unwrap();
        for k in [0.1, 0.5, 0.9] {
            assert_eq!(pop.actors.iter().filter(|a| a.state.k == k).count(), 333);
        }
        assert!(pop.actors.iter().all(|a| a.state.f_minus <= 0.5));
        assert_eq!(small_spec(100, 0).cohort_sizes(), vec![34, 33, 33]);
        assert_eq!(small_spec(2, 0).cohort_sizes(), vec![1, 1, 0]);
    }

    #[test]
    fn init_is_deterministic() {
        assert_eq!(
            init_population(&small_spec(50, 3)).unwrap(),
            init_population(&small_spec(50, 3)).unwrap()
        );
        assert_ne!(
            init_population(&small_spec(50, 3)).unwrap(),
            init_population(&small_spec(50, 4)).unwrap()
        );
        let sim = Simulation::new(small_spec(50, 3)).unwrap();
        assert_eq!(sim.population(), &init_population(&small_spec(50, 3)).unwrap());
    }

    #[test]
    fn rejects_tiny_population() {
        assert_eq!(init_population(&small_spec(1, 0)), Err(Error::PopulationTooSmall(1)));
    }

    #[test]
    fn pair_of_two_always_meets() {
        let mut sim = Simulation::new(small_spec(2, 11)).unwrap();
        for g in 1..=20u64 {
            let ev = sim.step().unwrap();
            assert_ne!(ev.speaker, ev.partner);
            assert_eq!(sim.population().communications, vec![g, g]);
        }
    }

    #[test]
    fn forced_policy_plays_the_forced_pair() {
        let mut spec = small_spec(10, 5);
        spec.rules.policy = PlayPolicy::Forced {
            row: Strategy::S2,
            col: Strategy::S1,
        };
        let mut sim = Simulation::new(spec).unwrap();
        for _ in 0..50 {
            let ev = sim.step().unwrap();
            assert_eq!(
                (ev.game.row_strategy, ev.game.col_strategy),
                (Strategy::S2, Strategy::S1)
            );
            assert!(ev.game.profile.is_none());
        }
    }

    #[test]
    fn histograms_conserve_actors_and_start_with_cohort_spikes() {
        let series = run_dissemination(&small_spec(60, 1), 300, 30, 50).unwrap();
        assert_eq!(series.len(), 11);
        assert!(series.iter().all(|h| h.total() == 60));
        let first = &series[0];
        assert_eq!(first.time, 0.0);
        let nonzero: Vec<usize> = (0..50).filter(|&i| first.counts[i] > 0).collect();
        assert_eq!(nonzero, vec![5, 25, 45]);
        assert!((series.last().unwrap().time - 10.0).abs() < 1e-12);
    }

    #[test]
    fn run_argument_errors() {
        assert_eq!(run_dissemination(&small_spec(10, 1), 10, 1, 0), Err(Error::ZeroBins));
        assert!(run_dissemination(&small_spec(10, 1), 10, 0, 5).is_err());
    }

    #[test]
    fn threshold_times() {
        let series = run_dissemination(&small_spec(30, 2), 200, 20, 10).unwrap();
        assert_eq!(time_to_threshold(&series, 0.0), Some(0.0));
        assert_eq!(time_to_threshold(&series, 0.99), None);
    }

    #[test]
    fn pair_mut_returns_requested_order() {
        let mut v = [1, 2, 3];
        let (a, b) = pair_mut(&mut v, 2, 0);
        assert_eq!((*a, *b), (3, 1));
    }
}
