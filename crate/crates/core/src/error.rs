use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("topology error at {element}: {msg}")]
    Topology { element: String, msg: String },

    #[error("degenerate face {face}: {msg}")]
    Degenerate { face: usize, msg: String },

    #[error("not star-shaped from vertex {apex}: base face {face}: {msg}")]
    NotStarShaped { apex: usize, face: usize, msg: String },

    #[error("simplex {simplex} cannot be realized: {msg}")]
    Realization { simplex: usize, msg: String },

    #[error("projection collapse: {0}")]
    ProjectionCollapse(String),

    #[error("invalid hat: {0}")]
    InvalidHat(String),

    #[error("invalid flip of edge ({0}, {1}): {2}")]
    InvalidFlip(usize, usize, String),

    #[error("completion stalled: {0}")]
    Stalled(String),

    #[error("no supporting plane at apex {apex}: {msg}")]
    NoSupportingPlane { apex: usize, msg: String },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("generator error: {0}")]
    Generator(String),

    #[error("excavation sampler found only {achieved} of {requested} flips")]
    SamplerExhausted { achieved: usize, requested: usize },

    #[error("inconsistency: {0}")]
    Inconsistency(String),
}
