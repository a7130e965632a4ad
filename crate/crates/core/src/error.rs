//! Library-wide error type. Every fallible operation returns `Result<_, Error>`
//! with a message specific enough to act on; nothing panics on user input.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("not a rational number: `{0}` (expected `p/q`, an integer, or a decimal)")]
    InvalidRational(String),

    #[error("unknown atom `{0}` (not in the model's atom registry)")]
    UnknownAtom(String),

    #[error("world assignment has {got} bits but the model declares {want} atoms")]
    WorldWidthMismatch { got: usize, want: usize },

    #[error("duplicate world assignment `{0}`")]
    DuplicateWorld(String),

    #[error("world weight {0} is negative")]
    NegativeWeight(String),

    #[error("total world weight must be positive")]
    ZeroTotalWeight,

    #[error("conditioning event has probability zero")]
    ZeroProbabilityCondition,

    #[error("relevance classification needs at least two propositions, got {0}")]
    TooFewPropositions(usize),

    #[error("schema body references variable `{0}` which is not in the schema's variable list")]
    UnboundVariable(String),

    #[error("the domain is empty; grounding requires at least one constant")]
    EmptyDomain,

    #[error("default rule `{0}` must have at least one justification")]
    NoJustifications(String),

    #[error("duplicate default rule id `{0}`")]
    DuplicateRuleId(String),

    #[error("theory has {got} grounded defaults, which exceeds the cap of {cap}")]
    DefaultCapExceeded { got: usize, cap: usize },

    #[error("background knowledge is inconsistent")]
    InconsistentBackground,

    #[error("evidence has probability zero, so no reason can be evaluated against it")]
    ZeroProbabilityEvidence,

    #[error("scenario `{0}` has no world model, which this operation requires")]
    MissingModel(String),

    #[error("scenario `{0}` has no default theory, which this operation requires")]
    MissingTheory(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
