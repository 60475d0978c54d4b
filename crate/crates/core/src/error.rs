use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable tables do not match")]
    TableMismatch,
    #[error("invalid variable table: {0}")]
    InvalidTable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("series has constant term {0}, expected 1")]
    NotAUnitSeries(String),
    #[error("term `{term}` is not divisible by `{var}`")]
    NotDivisible { var: String, term: String },
    #[error("replacement for `{var}` is not homogeneous of degree {degree}")]
    GradingViolation { var: String, degree: u32 },
    #[error("invalid rewrite rule: {0}")]
    InvalidRule(String),
    #[error("bundle has rank zero")]
    EmptyBundle,
    #[error("ring has no degree map (dimension unbounded or no fundamental class)")]
    NoDegreeMap,
    #[error("classes live in different rings")]
    RingMismatch,
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    #[error("twisting class must be homogeneous of degree 1")]
    NonLinearTwist,
    #[error("cannot take the quotient of a rank {total} bundle by a rank {sub} bundle")]
    RankUnderflow { total: usize, sub: usize },
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
    #[error("inconsistent scenario: {0}")]
    InconsistentScenario(String),
    #[error("context has no pushforward along the center")]
    NoPushforward,
    #[error("context has no restriction to the center")]
    NoPullback,
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unsupported request: {0}")]
    Unsupported(String),
    #[error("blow-up classes belong to different contexts")]
    ContextMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
