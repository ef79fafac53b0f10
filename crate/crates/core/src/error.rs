use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(&'static str),
    #[error("parameter search failed after {attempts} attempts")]
    ParameterSearch { attempts: u32 },
    #[error("message {m} outside the plaintext space [0, {bound})")]
    MessageOutOfRange { m: u64, bound: u64 },
    #[error("no discrete log found in [0, {max_m}]")]
    DiscreteLogNotFound { max_m: u64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parameter set mismatch")]
    ParamsMismatch,
    #[error("malformed encoding: {0}")]
    Malformed(&'static str),
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("point is not in the order-n subgroup")]
    NotInSubgroup,
    #[error("document text is not valid UTF-8")]
    Encoding,
    #[error("duplicate document id {0}")]
    DuplicateDocId(i64),
    #[error("document id {0} is outside the permutation domain for real documents")]
    DocIdOutOfDomain(i64),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("index is empty")]
    EmptyIndex,
    #[error("query is empty")]
    EmptyQuery,
    #[error("inverted list fragment has {got} entries, expected {expected}")]
    FragmentLength { expected: usize, got: usize },
}
