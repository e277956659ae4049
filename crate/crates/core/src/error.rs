use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("invalid interval bounds [{lo}, {hi}]")]
    InvalidBounds { lo: f64, hi: f64 },
    #[error("operation undefined on the empty interval")]
    EmptyInterval,
    #[error("divisor interval contains zero; use extended division")]
    ZeroInDivisor,
    #[error("operation undefined on an empty box")]
    EmptyBox,
    #[error("cannot bisect axis {axis}: component is a single point")]
    DegenerateAxis { axis: usize },
    #[error("axis {axis} out of range for a box of dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("subdivision count must be at least 1")]
    ZeroSubdivisions,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("arity error: {0}")]
    Arity(String),
    #[error("unknown identifier `{name}` at line {line}, column {column}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero during real evaluation")]
    DivByZero,
    #[error("expected {expected} {what} values, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{kind} index {index} out of bounds (dimension {dim})")]
    IndexOutOfBounds {
        kind: &'static str,
        index: usize,
        dim: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("search box or parameter box is empty")]
    EmptyDomain,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix dimension {n} exceeds the cap of {cap} for this routine")]
    DimensionTooLarge { n: usize, cap: usize },
    #[error("matrix dimensions do not agree: {0}")]
    DimensionMismatch(String),
    #[error("every candidate pivot in column {column} contains zero")]
    PivotContainsZero { column: usize },
    #[error("determinant enclosure contains zero")]
    SingularEnclosure,
    #[error("real matrix is singular to working precision")]
    SingularMatrix,
    #[error("contraction test failed: ‖I − Y·A‖∞ = {norm} ≥ 1")]
    VerificationFailed { norm: f64 },
    #[error("matrix must have at least one row")]
    EmptyMatrix,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("missing solver parameter `{0}` for this method")]
    MissingParameter(&'static str),
    #[error("invalid solver parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("missing cost-model parameter `{0}`")]
    MissingParameter(&'static str),
    #[error("invalid bench parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("suite `{0}` is long-running; pass --allow-long to run it")]
    LongSuite(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
