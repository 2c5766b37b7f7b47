use thiserror::Error;

/// Errors for graph construction, serialization, and the analysis ops.
///
/// `SizeLimit`, `EnumerationBudget`, and `InstanceTooLarge` mark inputs
/// beyond supported scale (CLI exit code 3); everything else is a
/// validation or I/O failure (CLI exit code 2).
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {v} out of range (graph has {n} vertices)")]
    VertexOutOfRange { v: u32, n: usize },

    #[error("self-loop at vertex {v} not allowed")]
    SelfLoop { v: u32 },

    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: u32, v: u32 },

    #[error("vertex {v} has degree {degree}, exceeding the bound {bound}")]
    DegreeBound { v: u32, degree: usize, bound: u32 },

    #[error("({u}, {v}) is not an edge of the graph")]
    NotAnEdge { u: u32, v: u32 },

    #[error("graph with {size} vertices exceeds the canonicalization limit {limit}")]
    SizeLimit { size: usize, limit: usize },

    #[error("connected-set enumeration exceeded its budget of {budget} set visits")]
    EnumerationBudget { budget: u64 },

    #[error("instance too large for {op}: {detail}")]
    InstanceTooLarge { op: &'static str, detail: String },

    #[error("radius mismatch: {a} vs {b}")]
    RadiusMismatch { a: u32, b: u32 },

    #[error("ensemble has no samples")]
    EmptyEnsemble,

    #[error("{0}")]
    Domain(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to: 3 for inputs
    /// beyond supported scale, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SizeLimit { .. }
            | Error::EnumerationBudget { .. }
            | Error::InstanceTooLarge { .. } => 3,
            _ => 2,
        }
    }
}

/// Convenience constructor for domain/precondition violations.
pub fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub type Result<T> = std::result::Result<T, Error>;
