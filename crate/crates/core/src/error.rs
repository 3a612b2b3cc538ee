use alloc::string::String;

use crate::funclang::EvalError;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("resolution must be at least 2 on every axis")]
    ResolutionTooSmall,
    #[error("function is +inf at every node")]
    AllInfinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operation supports at most {max} dimensions, got {found}")]
    DimensionTooHigh { max: usize, found: usize },
    #[error("point lies outside the hull of the support points")]
    OutsideHull,
    #[error("family member {index} is not contained in the envelope minimizer set")]
    SubsetNotInM { index: usize },
    #[error("tilt functional must have zero intercept, got {0}")]
    NonlinearTilt(f64),
    #[error("radius {radius} is below the dual resolution {spacing}")]
    RadiusBelowResolution { radius: f64, spacing: f64 },
    #[error("radii must be strictly decreasing")]
    RadiiNotDecreasing,
    #[error("no differentiability point within radius {radius} of the tilt")]
    DensityHypothesisFails { radius: f64 },
    #[error("{which} is not grid-convex (worst slack {slack})")]
    ConvexityHypothesisFails { which: &'static str, slack: f64 },
    #[error("functions are sampled on different grids")]
    GridMismatch,
    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("{0}")]
    Eval(#[from] EvalError),
}
