use thiserror::Error;

/// Errors raised by the matrix kernels, membership predicates and geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix dimension must be even and at least 2, got {0}")]
    OddDimension(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not symmetric (residual {residual:.3e})")]
    NotSymmetric { residual: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix is singular (smallest singular value {min_singular_value:.3e})")]
    Singular { min_singular_value: f64 },

    #[error("matrix is not symplectic (residual {residual:.3e})")]
    NotSymplectic { residual: f64 },

    #[error("matrix is not in the symplectic Lie algebra (residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },

    #[error("algebra element has the wrong parity: {0}")]
    WrongParity(&'static str),

    #[error("matrix is not a J-commuting orthogonal matrix (residual {residual:.3e})")]
    NotUnitaryJ { residual: f64 },

    #[error("vector is not tangent at the base point (residual {residual:.3e})")]
    NotTangent { residual: f64 },

    #[error("eigenvalue at angular distance {distance:.3e} from -1: principal logarithm is ambiguous")]
    BranchAmbiguity { distance: f64 },

    #[error("exponential overflow: 1-norm {norm:.3e} exceeds cap {cap:.3e}")]
    Overflow { norm: f64, cap: f64 },

    #[error("tangent projection system is rank deficient (reciprocal condition {rcond:.3e})")]
    SingularProjectionSystem { rcond: f64 },

    #[error("grid has {nodes} nodes, at least {required} required")]
    GridTooCoarse { nodes: usize, required: usize },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("no closed-form geodesic for metric {0}")]
    NoClosedForm(&'static str),

    #[error("unknown suite '{0}'")]
    UnknownSuite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed input, field '{field}': {message}")]
    Format { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn format(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for failures caused by the numerical data (branch cuts, singularity,
    /// overflow) rather than malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::BranchAmbiguity { .. }
                | Error::Singular { .. }
                | Error::Overflow { .. }
                | Error::SingularProjectionSystem { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::NonFinite
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
