//! JSON run configuration.
//!
//! A config is a flat JSON object. Every key is optional; missing keys take
//! the defaults of the chosen experiment and unknown keys are rejected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rumorgame::emergence::{EmergenceConfig, PruneRule};
use rumorgame::engine::{Cohort, GameRules, InitBounds, PlayPolicy, PopulationSpec};
use rumorgame::{GlobalParams, KnowledgeRule, Mode, SelectionRule, TraitVector};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config field `{field}`: {constraint}")]
    Invalid { field: String, constraint: String },
}

fn invalid(field: &str, constraint: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        constraint: constraint.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Solve,
    Disseminate,
    Emerge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    /// Every node gets exactly `degree` friends.
    #[default]
    Regular,
    /// Every node proposes `degree` friendships; duplicates merge.
    Initiated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum TraitsValue {
    Preset(String),
    Explicit { kappa: f64, rho: f64, pi: f64 },
}

/// On-disk form. Field names are the config keys.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<ExperimentKind>,
    phi: Option<f64>,
    delta: Option<f64>,
    lambda: Option<f64>,
    n_assertions: Option<u64>,
    gamma_r: Option<f64>,
    gamma_p: Option<f64>,
    cost_send: Option<f64>,
    cost_feedback: Option<f64>,
    knowledge_rule: Option<KnowledgeRule>,
    traits: Option<TraitsValue>,
    n_actors: Option<usize>,
    cohorts: Option<Vec<Cohort>>,
    bounds: Option<InitBounds>,
    mode: Option<Mode>,
    selection: Option<SelectionRule>,
    seed: Option<u64>,
    time_scale: Option<f64>,
    total_games: Option<u64>,
    snapshot_interval: Option<u64>,
    n_bins: Option<usize>,
    events: Option<bool>,
    graph: Option<GraphKind>,
    degree: Option<usize>,
    interactions_per_edge: Option<usize>,
    prune_rule: Option<PruneRule>,
    iterations: Option<usize>,
    reset_states: Option<bool>,
    fit_min: Option<usize>,
    fit_max: Option<usize>,
}

/// Fully resolved, validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: ExperimentKind,
    pub params: GlobalParams,
    pub traits: TraitVector,
    pub n_actors: usize,
    pub cohorts: Vec<Cohort>,
    pub bounds: InitBounds,
    pub mode: Mode,
    pub selection: SelectionRule,
    pub seed: u64,
    pub time_scale: f64,
    pub total_games: u64,
    pub snapshot_interval: u64,
    pub n_bins: usize,
    pub events: bool,
    pub graph: GraphKind,
    pub degree: usize,
    pub emergence: EmergenceConfig,
}

impl RunConfig {
    /// Defaults for `kind`: the dissemination experiment (1000 trolls, 5·10⁶
    /// games, i.e. 10⁴ communications per actor) or the emergence experiment
    /// (10,000 experts, 25 friends each, 5 games per edge).
    pub fn defaults(kind: ExperimentKind) -> Self {
        let (traits, n_actors) = match kind {
            ExperimentKind::Emerge => (TraitVector::EXPERT, 10_000),
            _ => (TraitVector::TROLL, 1000),
        };
        Self {
            kind,
            params: GlobalParams::default(),
            traits,
            n_actors,
            cohorts: Cohort::thirds(),
            bounds: InitBounds::default(),
            mode: Mode::Duplex,
            selection: SelectionRule::Welfare,
            seed: 0,
            time_scale: 2.0,
            total_games: 5_000_000,
            snapshot_interval: n_actors as u64,
            n_bins: 50,
            events: false,
            graph: GraphKind::Regular,
            degree: 25,
            emergence: EmergenceConfig::default(),
        }
    }

    pub fn population_spec(&self) -> PopulationSpec {
        PopulationSpec {
            n_actors: self.n_actors,
            traits: self.traits,
            cohorts: self.cohorts.clone(),
            bounds: self.bounds,
            rules: GameRules {
                params: self.params,
                mode: self.mode,
                selection: self.selection,
                policy: PlayPolicy::Equilibrium,
            },
            seed: self.seed,
            time_scale: self.time_scale,
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        self.population_spec().validate().map_err(core_to_config)?;
        if self.snapshot_interval == 0 {
            return Err(invalid("snapshot_interval", "must be >= 1"));
        }
        if self.n_bins == 0 {
            return Err(invalid("n_bins", "must be >= 1"));
        }
        if self.kind == ExperimentKind::Emerge {
            if self.degree == 0 || self.degree >= self.n_actors {
                return Err(invalid(
                    "degree",
                    format!("must lie in [1, n_actors), got {}", self.degree),
                ));
            }
            if self.graph == GraphKind::Regular && (self.degree * self.n_actors) % 2 == 1 {
                return Err(invalid("degree", "degree * n_actors must be even for a regular graph"));
            }
            let e = &self.emergence;
            if e.fit_min < 1 || e.fit_max < e.fit_min {
                return Err(invalid(
                    "fit_min",
                    format!("need 1 <= fit_min <= fit_max, got [{}, {}]", e.fit_min, e.fit_max),
                ));
            }
        }
        Ok(())
    }

    /// Serializes every field explicitly; `parse_config` reads it back to an
    /// equal config.
    pub fn to_json(&self) -> String {
        let p = &self.params;
        let e = &self.emergence;
        let raw = RawConfig {
            experiment: Some(self.kind),
            phi: Some(p.phi),
            delta: Some(p.delta),
            lambda: Some(p.lambda),
            n_assertions: Some(p.n_assertions),
            gamma_r: Some(p.gamma_r),
            gamma_p: Some(p.gamma_p),
            cost_send: Some(p.cost_send),
            cost_feedback: Some(p.cost_feedback),
            knowledge_rule: Some(p.knowledge_rule),
            traits: Some(TraitsValue::Explicit {
                kappa: self.traits.kappa,
                rho: self.traits.rho,
                pi: self.traits.pi,
            }),
            n_actors: Some(self.n_actors),
            cohorts: Some(self.cohorts.clone()),
            bounds: Some(self.bounds),
            mode: Some(self.mode),
            selection: Some(self.selection),
            seed: Some(self.seed),
            time_scale: Some(self.time_scale),
            total_games: Some(self.total_games),
            snapshot_interval: Some(self.snapshot_interval),
            n_bins: Some(self.n_bins),
            events: Some(self.events),
            graph: Some(self.graph),
            degree: Some(self.degree),
            interactions_per_edge: Some(e.interactions_per_edge),
            prune_rule: Some(e.prune_rule),
            iterations: Some(e.iterations),
            reset_states: Some(e.reset_states),
            fit_min: Some(e.fit_min),
            fit_max: Some(e.fit_max),
        };
        serde_json::to_string_pretty(&raw).expect("config serializes")
    }
}

fn core_to_config(e: rumorgame::Error) -> ConfigError {
    match e {
        rumorgame::Error::InvalidParameter { field, constraint } => ConfigError::Invalid { field, constraint },
        rumorgame::Error::PopulationTooSmall(n) => invalid("n_actors", format!("must be >= 2, got {n}")),
        other => invalid("config", other.to_string()),
    }
}

/// Parses and validates a JSON config for the experiment `kind`.
pub fn parse_config(text: &str, kind: ExperimentKind) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if let Some(k) = raw.experiment {
        if k != kind {
            return Err(invalid(
                "experiment",
                format!("config is for {k:?} but the {kind:?} command was run"),
            ));
        }
    }
    let mut c = RunConfig::defaults(kind);
    let p = &mut c.params;
    macro_rules! take {
        ($($src:ident => $dst:expr),* $(,)?) => {
            $(if let Some(v) = raw.$src { $dst = v; })*
        };
    }
    take! {
        phi => p.phi,
        delta => p.delta,
        lambda => p.lambda,
        n_assertions => p.n_assertions,
        gamma_r => p.gamma_r,
        gamma_p => p.gamma_p,
        cost_send => p.cost_send,
        cost_feedback => p.cost_feedback,
        knowledge_rule => p.knowledge_rule,
    }
    c.traits = match raw.traits {
        None => c.traits,
        Some(TraitsValue::Preset(name)) => TraitVector::preset(&name).ok_or_else(|| {
            invalid(
                "traits",
                format!("unknown preset `{name}` (expected `troll` or `expert`)"),
            )
        })?,
        Some(TraitsValue::Explicit { kappa, rho, pi }) => TraitVector { kappa, rho, pi },
    };
    if let Some(n) = raw.n_actors {
        c.n_actors = n;
        c.snapshot_interval = n as u64;
    }
    take! {
        cohorts => c.cohorts,
        bounds => c.bounds,
        mode => c.mode,
        selection => c.selection,
        seed => c.seed,
        time_scale => c.time_scale,
        total_games => c.total_games,
        snapshot_interval => c.snapshot_interval,
        n_bins => c.n_bins,
        events => c.events,
        graph => c.graph,
        degree => c.degree,
        interactions_per_edge => c.emergence.interactions_per_edge,
        prune_rule => c.emergence.prune_rule,
        iterations => c.emergence.iterations,
        reset_states => c.emergence.reset_states,
        fit_min => c.emergence.fit_min,
        fit_max => c.emergence.fit_max,
    }
    c.validate()?;
    Ok(c)
}
