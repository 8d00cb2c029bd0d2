use thiserror::Error;

use crate::game::{GameTrace, Player};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("illegal move by {player:?} at move index {move_index}")]
    IllegalMove { player: Player, move_index: usize },

    #[error("a game needs at least one round")]
    InvalidRounds,

    #[error("schedule infeasible: {0}")]
    ScheduleInfeasible(String),

    /// A geometric postcondition of the escape machinery did not hold.
    /// `trace` is attached by the game engine when the failure surfaces
    /// during play.
    #[error("escape assertion failed: {detail}")]
    EscapeAssertionFailed {
        detail: String,
        trace: Option<Box<GameTrace>>,
    },

    #[error("inductive invariant violated after block {block} for r = {r}")]
    InvariantViolated { block: usize, r: usize },

    #[error("cap selection exhausted after {candidates} candidates: best count {best}, needed {needed}")]
    SelectionExhausted {
        candidates: usize,
        best: usize,
        needed: usize,
    },

    #[error("certificate failed for r = {r}")]
    CertificateFailed { r: usize },

    #[error("empty sequence")]
    EmptySequence,

    #[error("lacunary padding impossible after size^2 = {t_sq}: no integer vector fits the window")]
    PaddingImpossible { t_sq: String },

    #[error("psi table does not cover N = {n} (covers up to {covered})")]
    TableRangeExceeded { n: u64, covered: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn escape(detail: impl Into<String>) -> Self {
        Error::EscapeAssertionFailed {
            detail: detail.into(),
            trace: None,
        }
    }
}
