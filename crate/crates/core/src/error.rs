use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cap vector must be non-empty")]
    EmptyCaps,
    #[error("cap vector must be positive, found {cap} at position {position}")]
    ZeroCap { position: usize, cap: u32 },
    #[error("cap vector must be increasing: c_{position} = {prev} > c_{} = {next}", position + 1)]
    NotIncreasing { position: usize, prev: u32, next: u32 },
    #[error("rank {rank} outside [1, {len}]")]
    InvalidRank { rank: usize, len: usize },
    #[error("position {position} outside [1, {len}]")]
    InvalidPosition { position: usize, len: usize },
    #[error("value {value} outside [1, {cap}] at position {position}")]
    InvalidValue { position: usize, value: u32, cap: u32 },
    #[error("sequence has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("sequence has {found} nonzero entries, expected {expected}")]
    WrongRank { expected: usize, found: usize },
    #[error("malformed labeled set: {0}")]
    MalformedLabeledSet(String),
    #[error("families live over different universes ({left} vs {right})")]
    UniverseMismatch { left: usize, right: usize },
    #[error("element {element} outside universe [1, {universe}]")]
    ElementOutOfRange { element: usize, universe: usize },
    #[error("families are not cross-intersecting")]
    NotCrossIntersecting,
    #[error("invalid weighted family: {0}")]
    InvalidWeightedFamily(String),
    #[error("subfamily member {0} is not in the weighted family")]
    NotAMember(String),
    #[error("universe size {size} too small: {reason}")]
    UniverseTooSmall { size: usize, reason: &'static str },
    #[error("refusing universe of size {size}: at most {max} supported ({reason})")]
    UniverseTooLarge {
        size: usize,
        max: usize,
        reason: &'static str,
    },
    #[error("context has an empty side")]
    EmptyUniverse,
    #[error("relation mismatch: {0}")]
    RelationMismatch(String),
    #[error("budget exceeded: {what} needs {needed}, limit is {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },
    #[error("k-fold search needs k >= 2, got {0}")]
    InvalidK(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
