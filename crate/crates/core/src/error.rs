use thiserror::Error;

use crate::pmap::MAX_N;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ambient size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("chain size {0} outside supported range 1..={MAX_N}")]
    ChainSize(usize),

    #[error("point {point} outside 1..={n}")]
    PointOutOfRange { point: usize, n: usize },

    #[error("domain points must be strictly ascending (pair {index})")]
    NotAscending { index: usize },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("pseudo-inverse undefined for empty map")]
    EmptyPseudoInverse,

    #[error("{0} is not a member of SS'_n")]
    NotMember(String),

    #[error("not a valid requisite shape: {0}")]
    RequisiteShape(String),

    #[error("index out of range: {0}")]
    IndexRange(String),

    #[error("no requisite in L*-class of {0}")]
    NoRequisite(String),

    #[error("lift undefined; complement too small (height {height}, n = {n})")]
    LiftUndefined { height: usize, n: usize },

    #[error("unsupported family parameters: {0}")]
    Family(String),

    #[error("not closed: {left} * {right} = {product} is missing from the element set")]
    NotClosed {
        left: String,
        right: String,
        product: String,
    },

    #[error("definitional check limited to {limit} elements, semigroup has {size}; use the characterized variant or raise the limit")]
    SizeGuard { size: usize, limit: usize },

    #[error("relation universe mismatch: {left} vs {right}")]
    UniverseMismatch { left: usize, right: usize },

    #[error("n = {n}, p = {p} is outside the ideal formula range 1 <= p <= n-2; use rank_oracle on SS'_n")]
    IdealFormulaRange { n: usize, p: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
