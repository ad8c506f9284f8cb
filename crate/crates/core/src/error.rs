use thiserror::Error;

use crate::words::Letter;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("letter {letter} is outside the alphabet of rank {rank}")]
    LetterOutOfRange { letter: i32, rank: u8 },

    #[error("invalid rank {0}: must be between 1 and 26")]
    InvalidRank(u32),

    #[error("unexpected character {0:?} in word")]
    BadCharacter(char),

    #[error("word {0:?} is not freely reduced")]
    NotReduced(String),

    #[error("operation requires a nonempty word")]
    EmptyWord,

    #[error("invalid growth function: {0}")]
    InvalidGrowthFunction(String),

    #[error("growth table arithmetic overflowed at level {0}")]
    Overflow(usize),

    #[error("no level is checkable with constant {constant} on horizons {left} and {right}")]
    EmptyCheckRange { constant: u64, left: usize, right: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("transition oracle is not involutive on edge {from:?} --{letter}--> {to:?}")]
    InvolutionViolation { from: Vec<i64>, letter: Letter, to: Vec<i64> },

    #[error("coset function undefined at vertex {vertex} for letter {letter} (safe horizon {horizon})")]
    UndefinedAtHorizon { vertex: usize, letter: Letter, horizon: usize },

    #[error("vertex budget of {0} exceeded")]
    BudgetExceeded(usize),

    #[error("operation needs a folded backend")]
    NotFolded,

    #[error("graphs are over different alphabets")]
    RankMismatch,

    #[error("growth function is bounded; use the finite-index fallback")]
    BoundedAlpha,

    #[error("growth function is unbounded; a finite-index subgroup cannot realize it")]
    UnboundedAlpha,

    #[error("the construction supports rank 2 only, got rank {0}")]
    UnsupportedRank(u8),

    #[error("coset function already defined at vertex {vertex} for letter {letter}")]
    AlreadyDefined { vertex: usize, letter: Letter },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal invariant broken: {0}")]
    Invariant(String),

    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,

    #[error("length {requested} exceeds the basis horizon {horizon}")]
    BeyondBasisHorizon { requested: usize, horizon: usize },

    #[error("depth {requested} exceeds the usable horizon {horizon}")]
    BeyondSafeHorizon { requested: usize, horizon: usize },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for errors caused by an insufficient horizon or resource budget.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::UndefinedAtHorizon { .. }
                | Error::BudgetExceeded(_)
                | Error::BeyondBasisHorizon { .. }
                | Error::BeyondSafeHorizon { .. }
                | Error::Overflow(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
