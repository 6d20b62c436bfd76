use thiserror::Error;

/// Errors raised across the library.
///
/// The CLI maps [`Error::Domain`], [`Error::TailLimit`] and
/// [`Error::Testability`] to exit code 2, and [`Error::Conditioning`] to 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A probability is smaller than the resolvable tail of the
    /// Tracy-Widom tables.
    #[error("probability beyond the representable Tracy-Widom tail (< {bound:e})")]
    TailLimit { bound: f64 },

    /// A matrix that must be nonsingular (or full rank) is not.
    #[error("ill-conditioned {matrix}: {detail}")]
    Conditioning { matrix: String, detail: String },

    /// The linear hypothesis is not estimable under a rank-deficient design.
    #[error("hypothesis is not testable: {0}")]
    Testability(String),
}

impl Error {
    /// Process exit code for this error: 3 for conditioning failures,
    /// 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Conditioning { .. } => 3,
            Error::Domain(_) | Error::TailLimit { .. } | Error::Testability(_) => 2,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn conditioning(matrix: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Conditioning {
            matrix: matrix.into(),
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
