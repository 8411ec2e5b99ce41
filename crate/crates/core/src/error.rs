use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {constraint}")]
    InvalidParameter { field: String, constraint: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    /// A finite game always has an equilibrium, so an empty result means the
    /// linear algebra broke down.
    #[error("numerical failure: no equilibrium found for a {rows}x{cols} game")]
    NoEquilibrium { rows: usize, cols: usize },

    #[error("cannot select an equilibrium from an empty candidate list")]
    EmptyCandidates,

    #[error("population needs at least 2 actors, got {0}")]
    PopulationTooSmall(usize),

    #[error("histogram needs at least one bin")]
    ZeroBins,

    #[error("cannot build a {degree}-regular graph on {n} nodes: {reason}")]
    ImpossibleGraph {
        n: usize,
        degree: usize,
        reason: &'static str,
    },

    #[error("power-law fit needs at least 3 nonzero degrees in range, found {found}")]
    TooFewPoints { found: usize },

    #[error("unknown prune rule `{0}` (expected `either`, `both` or `sum`)")]
    UnknownPruneRule(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            constraint: constraint.into(),
        }
    }
}
