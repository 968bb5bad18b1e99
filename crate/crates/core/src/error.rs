use thiserror::Error;

use crate::geometry::ShadowClass;

pub type Result<T> = std::result::Result<T, Error>;

/// Which face of a search box failed the sign test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Face {
    Low,
    High,
}

impl std::fmt::Display for Face {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Face::Low => f.write_str("low"),
            Face::High => f.write_str("high"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O: {0}")]
    Io(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{what} did not converge (best residual {residual:e})")]
    ConvergenceFailure {
        what: &'static str,
        best: Vec<f64>,
        residual: f64,
    },

    #[error("fiber along axis {axis} is degenerate ({class:?})")]
    FiberDegenerate { axis: usize, class: ShadowClass },

    #[error("reduced point lies outside the shadow along axis {axis}")]
    OutsideShadow { axis: usize },

    #[error("sign condition fails for axis {axis} on the {face} face (value {value:e})")]
    MirandaPrecondition { axis: usize, face: Face, value: f64 },

    #[error("every sub-box was rejected (best residual {residual:e})")]
    SearchExhausted { best: Vec<f64>, residual: f64 },

    #[error("hypothesis violation: {0}; run `diagnose` to inspect special corners and regularity")]
    HypothesisViolation(String),

    #[error("median intersection is degenerate: fiber along axis {axis} is tangent at the solution")]
    DegenerateIntersection { axis: usize },

    #[error("rhomb failed verification: {0}")]
    VerificationFailed(String),
}
