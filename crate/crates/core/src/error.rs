use thiserror::Error;

/// Every failure the library reports. `code()` gives a stable machine tag.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("all three omega charts are singular at this point")]
    AllChartsSingular,
    #[error("flow left the surface: residual {residual}")]
    SurfaceDrift { residual: String },
    #[error("no independent tangent pair at this point")]
    DegenerateFrame,
    #[error("identity mismatch in {label}: difference {diff}")]
    IdentityMismatch { label: String, diff: String },
    #[error("point is not singular (|N| = {0})")]
    NotSingular(String),
    #[error("degenerate 3-jet: {0}")]
    JetDegenerate(String),
    #[error("resultant vanished identically")]
    ResultantDegenerate,
    #[error("field is not tangent to the model surface: {0}")]
    NotTangential(String),
    #[error("decomposition failed: {0}")]
    DecompositionFailure(String),
    #[error("{0} is not a Markov number")]
    NotMarkovNumber(String),
    #[error("coordinate lies in the excluded set: {0}")]
    ExcludedZ(String),
    #[error("flow-time quadratic degenerates")]
    NoSolution,
    #[error("step-1 separation failed after {0} attempts")]
    RetryExhausted(usize),
    #[error("no quadratic root matches the target: {0}")]
    RootSelectionFailure(String),
    #[error("verification failed: max residual {max_residual}")]
    VerificationFailure { max_residual: String, table: Vec<String> },
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "Parse",
            Error::InvalidParams(_) => "InvalidParams",
            Error::AllChartsSingular => "AllChartsSingular",
            Error::SurfaceDrift { .. } => "SurfaceDrift",
            Error::DegenerateFrame => "DegenerateFrame",
            Error::IdentityMismatch { .. } => "IdentityMismatch",
            Error::NotSingular(_) => "NotSingular",
            Error::JetDegenerate(_) => "JetDegenerate",
            Error::ResultantDegenerate => "ResultantDegenerate",
            Error::NotTangential(_) => "NotTangential",
            Error::DecompositionFailure(_) => "DecompositionFailure",
            Error::NotMarkovNumber(_) => "NotMarkovNumber",
            Error::ExcludedZ(_) => "ExcludedZ",
            Error::NoSolution => "NoSolution",
            Error::RetryExhausted(_) => "RetryExhausted",
            Error::RootSelectionFailure(_) => "RootSelectionFailure",
            Error::VerificationFailure { .. } => "VerificationFailure",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
