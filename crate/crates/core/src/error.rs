use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no boundary in degree 0")]
    DegreeZeroBoundary,
    #[error("degenerate simplex {0:?}: repeated vertex")]
    DegenerateSimplex(Vec<usize>),
    #[error("simplex {0:?} is not in the complex")]
    MissingSimplex(Vec<usize>),
    #[error("degree mismatch: expected {expected}, got {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("degree {k} out of range for a complex of dimension {dim}")]
    DegreeOutOfRange { k: usize, dim: usize },
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("cycle does not bound")]
    DoesNotBound,
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("filling function undefined: nontrivial H1")]
    NontrivialH1,
    #[error("vertices {0} and {1} are disconnected")]
    Disconnected(usize, usize),
    #[error("coverage failure: uncovered vertices {0:?}")]
    Uncovered(Vec<usize>),
    #[error("internal consistency error: {0}")]
    Consistency(String),
    #[error("distortion bound violated: ratio {ratio}")]
    DistortionViolated { ratio: f64 },
    #[error("polyline escapes the half ball (norm {norm}, limit {limit})")]
    EscapesHalfBall { norm: f64, limit: f64 },
    #[error("chart/complex inconsistency: vertex {0} within r_h/2 lacks chart coordinates")]
    MissingChartCoords(usize),
    #[error("invalid polyline: {0}")]
    InvalidPolyline(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("tree data inconsistent: {0}")]
    TreeInconsistent(String),
    #[error("unlabeled vertex {0}")]
    UnlabeledVertex(usize),
    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
