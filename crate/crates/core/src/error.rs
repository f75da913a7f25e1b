use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

/// Every failure the laboratory can report.
///
/// Variants are grouped by the contract they break so callers (notably the
/// CLI) can map them onto exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("truncation error: {0}")]
    Truncation(String),
    #[error("divergence: {0}")]
    Divergence(String),
    #[error("instability: {0}")]
    Instability(String),
    #[error("segment error: {0}")]
    Segment(String),
    #[error("pole error: {0}")]
    Pole(String),
    #[error("branch error: {0}")]
    Branch(String),
    #[error("step failure: {0}")]
    StepFailure(String),
    #[error("band error: {0}")]
    Band(String),
    #[error("contamination: {0}")]
    Contamination(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("no critical point: {0}")]
    NoCriticalPoint(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl LabError {
    /// True for errors caused by bad inputs rather than failed numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, LabError::Validation(_) | LabError::Domain(_) | LabError::Branch(_))
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}
