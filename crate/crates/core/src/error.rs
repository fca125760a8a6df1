use thiserror::Error;

use crate::mesh::CellId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cell {cell} references missing {dim}-cell {face}")]
    MissingFace { cell: CellId, dim: usize, face: usize },
    #[error("invalid cell {cell}: {reason}")]
    InvalidCell { cell: CellId, reason: String },
    #[error("diamond property violated between {top} and {bottom}: {count} intermediate cells")]
    DiamondViolation {
        top: CellId,
        bottom: CellId,
        count: usize,
    },
    #[error("degenerate cell {cell}: measure {measure:e}")]
    DegenerateCell { cell: CellId, measure: f64 },
    #[error("{face} is not incident to {cell}")]
    NotIncident { cell: CellId, face: CellId },
    #[error("{face} is not a hyperface of {cell}")]
    NotHyperface { cell: CellId, face: CellId },
    #[error("orientation determinant of {cell} relative to {face} is numerically degenerate")]
    NumericallyDegenerate { cell: CellId, face: CellId },
    #[error("mesh is not orientable (conflict at {cell})")]
    NonOrientable { cell: CellId },
    #[error("mesh is not manifold-like: {0}")]
    NotManifold(String),
    #[error("corner {node} of {cell} has {edges} edges; cubical corners required")]
    NonCubicalCorners {
        cell: CellId,
        node: usize,
        edges: usize,
    },
    #[error("form degree {degree} exceeds mesh dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("cochain length {got} does not match {expected} cells")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-positive diffusivity {value} on K-edge {edge}")]
    NonPositiveAlpha { edge: usize, value: f64 },
    #[error("node {node} carries both Dirichlet and Neumann data")]
    ConflictingBC { node: usize },
    #[error("solver failed: {0}")]
    SolverDivergence(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("expected {expected}-cells, got a {got}-cell")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported section `{0}`")]
    UnsupportedSection(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
