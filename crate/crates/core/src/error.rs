use thiserror::Error;

/// Errors raised by constructors and numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("parameter {s} outside [0, {length}] on an open curve")]
    OutOfRange { s: f64, length: f64 },

    #[error("boundary loops do not match the curves: {0}")]
    Structural(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate tangent |γ'| = {speed} at s = {s}")]
    DegenerateTangent { s: f64, speed: f64 },

    #[error("chart failure: {0}")]
    ChartFailure(String),

    #[error("point outside the chart cylinder")]
    OutOfChart,

    #[error("disk assignment failed at t = {t}: {reason}")]
    Assignment { t: f64, reason: String },

    #[error("point is not on any intersection component (distance {distance})")]
    NoComponent { distance: f64 },

    #[error("geodesic left the chart domain at {0:?}")]
    LeftChart([f64; 3]),

    #[error("log map failed to converge (residual {residual})")]
    LogFailure { residual: f64 },

    #[error("generator rejected the parameters: {0}")]
    Rejected(String),

    #[error("unknown metric identifier `{0}`")]
    UnknownMetric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
