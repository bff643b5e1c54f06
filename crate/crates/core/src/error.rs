use thiserror::Error;

use crate::shamir::MemberId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("value is not invertible modulo the given prime")]
    NonInvertible,

    #[error("parameter generation gave up after {attempts} attempts")]
    ParamGeneration { attempts: usize },

    #[error("invalid group parameters: {0}")]
    InvalidParams(String),

    #[error("hash fixture has no entry for call tag {0:?}")]
    FixtureMiss(String),

    #[error("invalid scalar: {0}")]
    InvalidScalar(String),

    #[error("invalid group element: {0}")]
    InvalidElement(String),

    #[error("member id 0 is not allowed")]
    ZeroMemberId,

    #[error("member {0} appears more than once (ids must be distinct mod q)")]
    DuplicateMember(MemberId),

    #[error("member {0} is not on the board")]
    UnknownMember(MemberId),

    #[error("member {0} is not part of the signing subset")]
    NotInSubset(MemberId),

    #[error("threshold {t} is invalid for a group of {n}")]
    InvalidThreshold { t: usize, n: usize },

    #[error("signing subset has {have} members, threshold is {need}")]
    SubsetTooSmall { have: usize, need: usize },

    #[error("gave up resampling a nonzero masked share for member {0}")]
    ResampleExhausted(MemberId),

    #[error("board and key for member {uid} are inconsistent: {reason}")]
    BoardMismatch { uid: MemberId, reason: String },

    #[error("missing commitment from member {0}")]
    MissingCommitment(MemberId),

    #[error("partial signature verification failed for member(s) {}", join_ids(.0))]
    PartialRejected(Vec<MemberId>),

    #[error("partial signatures disagree on the challenge")]
    ChallengeMismatch,

    #[error("group signature does not verify for this receiver")]
    SignatureInvalid,

    #[error("no Lagrange weight supplied for member {0}")]
    MissingWeight(MemberId),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("protocol invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

fn join_ids(ids: &[MemberId]) -> String {
    ids.iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
