use std::fmt;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Location of a parse failure inside an input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Line(usize),
    Byte(usize),
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Line(n) => write!(f, "line {n}"),
            Position::Byte(n) => write!(f, "byte {n}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {height}x{width} image geometry does not match {rows} rows")]
    DimensionMismatch {
        height: usize,
        width: usize,
        rows: usize,
    },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("at least 2 samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("column {0} has (near) zero norm")]
    ZeroColumn(usize),
    #[error("diagonal entry {0} of a coefficient matrix is nonzero")]
    NonzeroDiagonal(usize),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("all off-diagonal inner products vanish; the regularization weight is undefined")]
    DegenerateGram,
    #[error("linear solve failed: {0}")]
    SolveFailure(String),
    #[error("ADMM stopped after {iterations} iterations with relative residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("symmetric eigendecomposition failed")]
    EigFailure,
    #[error("patch at level {level} is {height}x{width}; both sides must be at least 2 pixels")]
    PatchTooSmall {
        level: usize,
        height: usize,
        width: usize,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error in {path} at {position}: {message}", path = .path.display())]
    Parse {
        path: PathBuf,
        position: Position,
        message: String,
    },
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("node (level {level}, index {index}) failed: {source}")]
    Node {
        level: usize,
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
