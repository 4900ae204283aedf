use thiserror::Error;

use crate::prob_core::ExactRational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a probability space needs at least one outcome")]
    Empty,
    #[error("{outcomes} outcomes but {weights} weights")]
    LengthMismatch { outcomes: usize, weights: usize },
    #[error("weights sum to {sum}, not 1")]
    NotNormalized { sum: ExactRational },
    #[error("weight at position {index} is negative ({weight})")]
    NegativeWeight { index: usize, weight: ExactRational },
    #[error("outcome label at position {index} repeats an earlier label")]
    DuplicateLabel { index: usize },
    #[error("event mentions an outcome that is not in the space: {label}")]
    UnknownLabel { label: String },
    #[error("random variable is undefined on outcome {label}")]
    UndefinedOutcome { label: String },
    #[error("no second experiment given for base outcome {label}")]
    MissingBranch { label: String },
    #[error("conditioning event has probability zero")]
    ImpossibleCondition,
    #[error("events do not partition the sample space")]
    NotAPartition,
    #[error("partition cell {index} has probability zero")]
    ImpossibleCell { index: usize },
    #[error("{law} does not hold: {lhs} != {rhs}")]
    LawViolation {
        law: &'static str,
        lhs: Box<ExactRational>,
        rhs: Box<ExactRational>,
    },
    #[error("{what}: n = {n} exceeds the cap of {cap}")]
    TooLarge {
        what: &'static str,
        n: usize,
        cap: usize,
    },
    #[error("run is not a valid run for n = {n}")]
    InvalidRun { n: usize },
    #[error("invalid rank interval [{i}, {j}] for n = {n}")]
    InvalidInterval { n: usize, i: usize, j: usize },
    #[error("rank {q} is outside the interval [{i}, {j}]")]
    RankOutOfInterval { q: usize, i: usize, j: usize },
    #[error("expected 1 <= i < j <= {n}, got i = {i}, j = {j}")]
    BadPair { n: usize, i: usize, j: usize },
    #[error("input contains duplicate items")]
    DuplicateItems,
    #[error("at least one trial is required")]
    ZeroTrials,
    #[error("unknown suite `{0}` (expected one of core-laws, space, recurrence, splitter, simulator, all)")]
    UnknownSuite(String),
    #[error("cannot parse run notation at byte {offset}: {reason}")]
    ParseRun { offset: usize, reason: &'static str },
}
