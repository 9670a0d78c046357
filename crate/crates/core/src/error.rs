use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("dimension mismatch: expected F_{expected_q}^{expected_n}, got F_{found_q}^{found_n}")]
    DimensionMismatch {
        expected_q: u32,
        expected_n: usize,
        found_q: u32,
        found_n: usize,
    },

    #[error("enumeration of {what} needs {required} items, cap is {cap}")]
    EnumerationTooLarge {
        what: &'static str,
        required: String,
        cap: u64,
    },

    #[error("oracle search over |S|+|T| = {size} elements exceeds cap {cap}")]
    SearchTooLarge { size: usize, cap: usize },

    #[error("polynomial has total degree {degree} > {limit}")]
    DegreeTooHigh { degree: usize, limit: usize },

    #[error("matrix is zero")]
    ZeroMatrix,

    #[error("input matrix {index} is a linear combination of its predecessors")]
    DependentInput { index: usize },

    #[error("minimum line cover has size {cover} but the rank bound is {bound}")]
    BoundViolated { cover: usize, bound: usize },

    #[error("invariant `{name}` failed: {detail}")]
    InvariantViolated { name: &'static str, detail: String },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("invalid value: {0}")]
    Validation(String),
}

impl Error {
    pub(crate) fn mismatch(expected: (u32, usize), found: (u32, usize)) -> Self {
        Error::DimensionMismatch {
            expected_q: expected.0,
            expected_n: expected.1,
            found_q: found.0,
            found_n: found.1,
        }
    }

    /// True for refusals caused by a resource cap rather than bad input or a failed check.
    pub fn is_cap_refusal(&self) -> bool {
        matches!(
            self,
            Error::EnumerationTooLarge { .. } | Error::SearchTooLarge { .. }
        )
    }

    /// True when a library-level invariant or bound check failed.
    pub fn is_verification_failure(&self) -> bool {
        matches!(
            self,
            Error::BoundViolated { .. } | Error::InvariantViolated { .. }
        )
    }
}
