use thiserror::Error;

/// Errors produced by the estimators and their input validation.
///
/// Row, column and vertex indices carried by variants are 0-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("need at least 2 rows, got {0}")]
    TooFewRows(usize),

    #[error("need at least 3 columns, got {0}")]
    TooFewCols(usize),

    #[error("duplicate column name `{0}`")]
    DuplicateName(String),

    #[error("row {row} has {found} values, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("expected {expected} names, got {found}")]
    NameCount { expected: usize, found: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid vertex pair ({0}, {1})")]
    InvalidPair(usize, usize),

    #[error("nearest neighbours requested in a 0-dimensional space")]
    DegenerateDim,

    #[error(
        "zero denominator for pair ({i}, {j}): column {i} is a function of the conditioning set"
    )]
    DegenerateDenominator { i: usize, j: usize },

    #[error("threshold must be finite and non-negative, got {0}")]
    NegativeLambda(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("glasso did not converge in {max_iter} iterations (last change {last_delta:e}, KKT residual {kkt_residual:e})")]
    NotConverged {
        max_iter: usize,
        last_delta: f64,
        kkt_residual: f64,
    },

    #[error("covariance matrix is singular; a positive penalty is required")]
    SingularInput,

    #[error("truth graph has no edges; TPR is undefined")]
    NoTrueEdges,

    #[error("truth graph is complete; FPR is undefined")]
    NoTrueNonEdges,

    #[error("model {model} needs p >= {min}, got {p}")]
    BadDimension { model: String, min: usize, p: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
