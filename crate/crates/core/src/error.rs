use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("direction ({0}, {1}) is not a primitive integer vector")]
    NonPrimitiveDirection(i64, i64),

    #[error("lines are parallel in factor {factor}: the brane pair is not transverse")]
    ParallelLines { factor: usize },

    #[error("point is not on the line")]
    PointNotOnLine,

    #[error("invalid ambient torus: {0}")]
    InvalidAmbient(String),

    #[error("invalid brane: {0}")]
    InvalidBrane(String),

    #[error("degree is not an integer (float route {float}, exact route {exact}); phase lift inconsistency")]
    NonIntegerDegree { float: f64, exact: i64 },

    #[error("degenerate corners: generators {0} and {1} coincide in factor {2}; perturb the offsets")]
    DegenerateCorners(usize, usize, usize),

    #[error("degenerate polygon class (zero area or collinear corners)")]
    DegenerateClass,

    #[error("polygon class does not contribute (holomorphic count is 0)")]
    NonContributingClass,

    #[error("quadratic has non-positive leading coefficient")]
    NonPositiveLeadingCoefficient,

    #[error("series did not converge: tail bound {achieved:e} at cutoff {cutoff} exceeds tolerance {tol:e}")]
    ConvergenceFailure { achieved: f64, cutoff: f64, tol: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("class degenerates along the isotopy: {0}")]
    TransversalityLost(String),

    #[error("class bijection failed between the two endpoints of the isotopy: {0}")]
    BijectionFailed(String),

    #[error("quadrature did not converge: estimated error {estimate:e} above {tol:e}")]
    QuadratureNotConverged { estimate: f64, tol: f64 },

    #[error("relative cocycle condition violated: {0}")]
    CocycleViolation(String),

    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),

    #[error("expression error: {0}")]
    Expr(String),
}

pub type Result<T> = std::result::Result<T, Error>;
