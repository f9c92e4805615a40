use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("inconsistent rotation system: {0}")]
    InconsistentRotation(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("rotation system is not planar: V - E + F = {0}")]
    NotPlanar(i64),
    #[error("invalid conductance {value} on edge {edge}")]
    InvalidConductance { edge: usize, value: f64 },
    #[error("invalid vertex set: {0}")]
    InvalidVertexSet(String),
    #[error("every vertex lies inside a peninsula")]
    AllPeninsulas,
    #[error("vertex cap of {cap} exceeded")]
    VertexCapExceeded { cap: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidSpec(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("target set unreachable from source set")]
    Unreachable,
    #[error("network has no wired boundary vertex")]
    NoBoundary,
    #[error("edge {0} is a self-loop")]
    LoopEdge(usize),
    #[error("linear solver did not converge: relative residual {0:e}")]
    SolverDiverged(f64),
    #[error("walk step cap of {0} exceeded")]
    StepCapExceeded(u64),
    #[error("vertices {0} and {1} lie in different forest components")]
    DifferentComponents(usize, usize),
    #[error("spanning-tree count exceeds enumeration cap of {0}")]
    EnumerationCapExceeded(usize),
    #[error("conditioning event has probability zero")]
    ZeroProbability,
    #[error("network is not polyhedral")]
    NotPolyhedral,
    #[error("packing iteration did not converge after {iterations} sweeps (angle residual {residual:e})")]
    PackingNotConverged { iterations: usize, residual: f64 },
    #[error("packing error: {0}")]
    Packing(String),
    #[error("{0} is not an edge")]
    NotAnEdge(String),
    #[error("tail fit: {0}")]
    Fit(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
