use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical method stopped before reaching its target accuracy.
    #[error(
        "accuracy error in {context}: achieved estimate {estimate:e} exceeds target {target:e}"
    )]
    Accuracy {
        context: String,
        estimate: f64,
        target: f64,
    },

    /// The request is well posed but outside what this implementation covers.
    #[error("unsupported: {0}")]
    Capability(String),

    /// A ratio whose denominator vanishes.
    #[error("singular ratio: {0}")]
    SingularRatio(String),

    /// A zero scan whose count kept changing under refinement.
    #[error(
        "zero count not stable after {halvings} halvings (last counts {previous} and {current})"
    )]
    Resolution {
        halvings: usize,
        previous: usize,
        current: usize,
    },

    /// A grid window too small for the requested evaluation.
    #[error("window error: {0}")]
    Window(String),

    /// Input data violating a structural requirement (negative density, etc).
    #[error("integrity error: {0}")]
    Integrity(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn accuracy(context: impl Into<String>, estimate: f64, target: f64) -> Self {
        Error::Accuracy {
            context: context.into(),
            estimate,
            target,
        }
    }

    /// Prefix the context of an accuracy error, leaving other variants untouched.
    pub fn within(self, outer: &str) -> Self {
        match self {
            Error::Accuracy {
                context,
                estimate,
                target,
            } => Error::Accuracy {
                context: format!("{outer}: {context}"),
                estimate,
                target,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
