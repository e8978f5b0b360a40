use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("element has negative valuation {0}; it is not in the ring of integers")]
    NegativeValuation(i64),

    #[error("series is not a unit: constant term vanishes")]
    NotAUnit,

    #[error("operator is not MOM at zero: a_{index}(0) != 0")]
    NotMom { index: usize },

    #[error("matrix A(0) is not nilpotent")]
    NotNilpotent,

    #[error("leading delta-coefficient vanishes at z = 0")]
    LeadingNotUnit,

    #[error("verification of {identity} failed at order {order}")]
    VerificationFailed { identity: String, order: usize },

    #[error("truncation order exhausted: need {needed}, have {available}")]
    OrderExhausted { needed: usize, available: usize },

    #[error("no certificate found with degree bound {deg_bound}")]
    ReconstructionFailed { deg_bound: usize },

    #[error("candidate denominator has a root in the open unit disc")]
    NotInK0,

    #[error("coefficient {index} is not integral (valuation {valuation})")]
    IntegralityFailure { index: usize, valuation: i64 },

    #[error("series kind not available in this context: {0}")]
    BadContext(String),

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("level {0} is too large for machine-word residue arithmetic")]
    LevelTooLarge(i64),
}
