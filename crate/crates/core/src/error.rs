use thiserror::Error;

use crate::lattice::{Plane, Vertex};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice spec: {0}")]
    InvalidSpec(String),

    #[error("undefined stabilizer: star at vertex {vertex:?} in plane {plane} has missing edges")]
    UndefinedStabilizer { vertex: Vertex, plane: Plane },

    #[error("malformed gate: {0}")]
    InvalidGate(String),

    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitCountMismatch { expected: usize, found: usize },

    #[error("{n} qubits is too many for dense simulation (limit {max})")]
    TooManyQubits { n: usize, max: usize },

    #[error("measurement record violates constraints: rank check failed ({} violated dual layer(s))", violated_layers.len())]
    InconsistentRecord { violated_layers: Vec<crate::lattice::DualLayer> },

    #[error("coloring does not wrap: periodic {axis} extent {len} is odd; use even lx/ly (and lz = 1 or even) or the greedy cz12 schedule")]
    ColoringDoesNotWrap { axis: char, len: usize },

    #[error("schedule violation: {0}")]
    ScheduleViolation(String),

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("invalid error event: {0}")]
    InvalidEvent(String),

    #[error("pipeline stage error: {0}")]
    Stage(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("document mismatch: {0}")]
    Document(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
