use crate::C64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("exponential overflow in evaluation chain at z = {0}")]
    OverflowInChain(C64),
    #[error("exponential overflow at z = {0}")]
    OverflowAtPoint(C64),
    #[error("point {0} lies outside the metric's region")]
    OutsideRegion(C64),
    #[error("no sampled point satisfies the constraint (threshold {0})")]
    NoSampleSatisfiesConstraint(f64),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("basepoint {0} is (numerically) critical")]
    CriticalBasepoint(C64),
    #[error("step budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("{0} is not an isolated singular value of the map")]
    NotIsolatedSingularValue(C64),
    #[error("neighbourhood contains the critical value {0}")]
    UContainsCriticalValues(C64),
    #[error("radius {radius} is below the tract's minimum radius {min_radius}")]
    RadiusTooSmall { radius: f64, min_radius: f64 },
    #[error("fixed point continuation broke down at lambda = {lambda}: {reason}")]
    ContinuationBreakdown { lambda: C64, reason: String },
    #[error("function vanishes (numerically) on the contour at {0}")]
    ZeroOnContour(C64),
    #[error("contour refinement exceeded {0} evaluations")]
    StepLimitExceeded(usize),
    #[error("winding number zero: no root in the disc of radius {0}")]
    NoRootInDisc(f64),
    #[error("Newton iteration did not converge from seed {0}")]
    NonConvergence(C64),
    #[error("invalid map identifier `{0}`")]
    UnknownMap(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("png encoding failed: {0}")]
    Png(#[from] png::EncodingError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable, machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OverflowInChain(_) => "OverflowInChain",
            Error::OverflowAtPoint(_) => "OverflowAtPoint",
            Error::OutsideRegion(_) => "OutsideRegion",
            Error::NoSampleSatisfiesConstraint(_) => "NoSampleSatisfiesConstraint",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::CriticalBasepoint(_) => "CriticalBasepoint",
            Error::BudgetExhausted(_) => "BudgetExhausted",
            Error::NotIsolatedSingularValue(_) => "NotIsolatedSingularValue",
            Error::UContainsCriticalValues(_) => "UContainsCriticalValues",
            Error::RadiusTooSmall { .. } => "RadiusTooSmall",
            Error::ContinuationBreakdown { .. } => "ContinuationBreakdown",
            Error::ZeroOnContour(_) => "ZeroOnContour",
            Error::StepLimitExceeded(_) => "StepLimitExceeded",
            Error::NoRootInDisc(_) => "NoRootInDisc",
            Error::NonConvergence(_) => "NonConvergence",
            Error::UnknownMap(_) => "UnknownMap",
            Error::Io(_) => "IOError",
            Error::Png(_) => "IOError",
            Error::Json(_) => "JsonError",
        }
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::PreconditionViolated(msg.into())
    }
}
