use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group arithmetic: {0}")]
    GroupArithmetic(String),
    #[error("degree {0} is singular")]
    Domain(String),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("coloring not admissible: edge {edge} has singular value {value}")]
    Admissibility { edge: usize, value: String },
    #[error("gauge-shifted coloring not admissible: {0}")]
    GaugeAdmissibility(String),
    #[error("no usable probe degree for plaquette {plaquette}: {hint}")]
    NoProbe { plaquette: usize, hint: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("state space dimension exceeds cap {cap} (reached {reached})")]
    DimensionCap { reached: usize, cap: usize },
    #[error("numerical instability: {0}")]
    Instability(String),
    #[error("invalid surface: {0}")]
    Topology(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
