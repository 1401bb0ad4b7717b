use thiserror::Error;

use crate::geometry::Vertex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WedgeError {
    #[error("profile must constrain at least one coordinate (d = 0)")]
    ZeroDimension,

    #[error("profile {coord} decreases at n = {n}: f({n}) = {prev} > f({next}) = {value}", next = n + 1)]
    NonMonotone {
        coord: usize,
        n: u64,
        prev: f64,
        value: f64,
    },

    #[error("profile {coord} takes negative value {value} at n = {n}")]
    NegativeValue { coord: usize, n: u64, value: f64 },

    #[error("profile {coord}: {reason}")]
    InvalidParameter { coord: usize, reason: String },

    #[error("query at {requested} exceeds horizon {horizon}")]
    HorizonExceeded { requested: u64, horizon: u64 },

    #[error("vertex {0} is not in the wedge")]
    NotInWedge(Vertex),

    #[error("vertex {0} lies outside the truncation")]
    OutsideTruncation(Vertex),

    #[error("anchor {0} is not in V_(r-1)")]
    AnchorOutsideTruncation(Vertex),

    #[error("vertex {0} is not in the transported domain")]
    NotInVx(Vertex),

    #[error("flow domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("source is not connected to any sink")]
    Disconnected,

    #[error("source vertex belongs to the sink set")]
    SourceIsSink,

    #[error("linear solve did not reach tolerance {tol:e} (residual {residual:e} after {iterations} iterations)")]
    SolverFailure {
        residual: f64,
        tol: f64,
        iterations: usize,
    },

    #[error("invalid profile document: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, WedgeError>;
