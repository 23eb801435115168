use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Every failure the algorithms can report.
///
/// Variants are grouped the way the command line maps them onto exit codes:
/// parameter, input and structural problems are validation errors, the
/// numeric ones come from solvers and training.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside its documented domain.
    Parameter(String),
    /// Input data is malformed (non-finite values, wrong shapes).
    Input(String),
    /// A record is too short to produce any trial.
    Empty(String),
    /// A filtration or simplex violates a structural invariant.
    Structural(String),
    /// An iterative solver did not converge.
    Numeric(String),
    /// Persistent entropy is undefined: no bar has positive lifetime.
    UndefinedEntropy { dim: usize },
    /// Subjects were processed with different pipeline parameters.
    Consistency(String),
    /// A class cannot be spread over every fold.
    Stratification(String),
    /// A model could not be trained on the given data.
    Training(String),
    /// Training loss became non-finite.
    Divergence { epoch: usize },
    /// A statistic is undefined for the given sample.
    Degenerate(String),
}

impl Error {
    /// Whether the error comes from numerical work rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Numeric(_) | Error::Divergence { .. } | Error::Degenerate(_) | Error::Training(_)
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Input(msg) => write!(f, "invalid input: {msg}"),
            Error::Empty(msg) => write!(f, "empty output: {msg}"),
            Error::Structural(msg) => write!(f, "structural error: {msg}"),
            Error::Numeric(msg) => write!(f, "numeric error: {msg}"),
            Error::UndefinedEntropy { dim } => {
                write!(f, "persistent entropy undefined: no H{dim} bar with positive lifetime")
            }
            Error::Consistency(msg) => write!(f, "inconsistent provenance: {msg}"),
            Error::Stratification(msg) => write!(f, "stratification error: {msg}"),
            Error::Training(msg) => write!(f, "training error: {msg}"),
            Error::Divergence { epoch } => write!(f, "training diverged (non-finite loss) at epoch {epoch}"),
            Error::Degenerate(msg) => write!(f, "degenerate statistic: {msg}"),
        }
    }
}

#[cfg(any(test, feature = "std"))]
impl std::error::Error for Error {}
