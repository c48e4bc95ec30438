use alloc::string::String;
use core::fmt;

/// Errors raised while building bases, refinements, lifting schemes and
/// transform plans.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An abscissa fell outside `[0, 1]`.
    Domain { x: f64 },
    /// A tabulated function was queried away from its grid.
    UnsupportedPoint { x: f64 },
    /// A derivative order above what the function can supply.
    DerivativeOrder { requested: usize, available: usize },
    /// A smooth family failed validation.
    InvalidFamily(String),
    /// A knot grid or hierarchy failed validation.
    InvalidGrid(String),
    /// Too few knots for the requested order.
    GridTooSmall { knots: usize, required: usize },
    /// A matrix was singular or too badly conditioned to trust.
    Conditioning {
        context: &'static str,
        index: Option<usize>,
        rcond: f64,
    },
    /// An overdetermined system that should have been consistent was not.
    Inconsistent {
        context: &'static str,
        index: usize,
        residual: f64,
    },
    /// The assembled basis system was not square.
    Assembly { unknowns: usize, equations: usize },
    /// A structural zero carried a nonzero value.
    Structural {
        context: &'static str,
        row: usize,
        col: usize,
    },
    /// Band elimination in the lifting factorization broke down.
    Factoring { step: usize, column: usize },
    /// The moment system of the final update was singular.
    Design { wavelet: usize },
    /// A vector or matrix had the wrong size.
    Shape { expected: usize, found: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { x } => write!(f, "abscissa {x} lies outside [0, 1]"),
            Error::UnsupportedPoint { x } => {
                write!(f, "tabulated function has no data at x = {x}")
            }
            Error::DerivativeOrder {
                requested,
                available,
            } => write!(
                f,
                "derivative of order {requested} requested, only {available} available"
            ),
            Error::InvalidFamily(msg) => write!(f, "invalid smooth family: {msg}"),
            Error::InvalidGrid(msg) => write!(f, "invalid knot grid: {msg}"),
            Error::GridTooSmall { knots, required } => write!(
                f,
                "grid has {knots} knots but at least {required} are required"
            ),
            Error::Conditioning {
                context,
                index,
                rcond,
            } => match index {
                Some(i) => write!(
                    f,
                    "{context}: ill-conditioned at index {i} (rcond {rcond:.3e})"
                ),
                None => write!(f, "{context}: ill-conditioned (rcond {rcond:.3e})"),
            },
            Error::Inconsistent {
                context,
                index,
                residual,
            } => write!(
                f,
                "{context}: inconsistent system at index {index} (residual {residual:.3e})"
            ),
            Error::Assembly {
                unknowns,
                equations,
            } => write!(
                f,
                "basis system has {unknowns} unknowns but {equations} equations"
            ),
            Error::Structural { context, row, col } => {
                write!(f, "{context}: nonzero structural entry at ({row}, {col})")
            }
            Error::Factoring { step, column } => write!(
                f,
                "lifting factorization broke down at step {step}, column {column}"
            ),
            Error::Design { wavelet } => {
                write!(f, "final update: singular moment system for wavelet {wavelet}")
            }
            Error::Shape { expected, found } => {
                write!(f, "expected length {expected}, found {found}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
