//! Error type shared by every numeric routine.

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumError {
    #[error("argument {0} is at a pole")]
    Pole(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("contour integral did not converge: {0}")]
    ContourNonConvergence(String),
    #[error("endpoint singularity exponent {0} is not integrable")]
    EndpointSingularity(f64),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("argument outside the valid sector: {0}")]
    Sector(String),
    #[error("argument lies on a discontinuity ray: {0}")]
    OnRay(String),
    #[error("argument on a branch cut: {0}")]
    BranchCut(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("singular moment matrix at degree {degree}")]
    SingularMoment { degree: usize },
    #[error("polynomial degree {have} too low, need {need}")]
    DegreeTooLow { have: usize, need: usize },
    #[error("equilibrium support is not one interval: {0}")]
    NotOneCut(String),
    #[error("edge-exponent fit failed: {0}")]
    FitFailure(String),
    #[error("cancellation exceeded the precision budget: {0}")]
    PrecisionLoss(String),
    #[error("non-finite value produced in {0}")]
    NonFinite(String),
}

pub type Result<T> = core::result::Result<T, NumError>;
