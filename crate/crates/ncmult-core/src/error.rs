use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    DimensionMismatch { expected: usize, found: usize },
    NotSquare { rows: usize, cols: usize },
    NotHermitian { deviation: f64 },
    NotPsd { min_eigenvalue: f64 },
    InvalidExponent(f64),
    NoConvergence { iterations: usize, residual: f64 },
    GroupMismatch,
    NotSubgroup { a: usize, b: usize },
    NotNormal { witness: usize },
    NotHomomorphism { g: usize, h: usize },
    OverlappingTranslates { a: usize, b: usize },
    ZeroBudget,
    IntervalNotClosed { lower: f64, upper: f64 },
    InvalidInput(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            Error::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (deviation {deviation:.3e})")
            }
            Error::NotPsd { min_eigenvalue } => {
                write!(f, "matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")
            }
            Error::InvalidExponent(p) => write!(f, "invalid exponent {p}"),
            Error::NoConvergence { iterations, residual } => {
                write!(f, "no convergence after {iterations} iterations (residual {residual:.3e})")
            }
            Error::GroupMismatch => write!(f, "operands live on different groups"),
            Error::NotSubgroup { a, b } => write!(f, "not a subgroup: closure fails for ({a}, {b})"),
            Error::NotNormal { witness } => write!(f, "subgroup is not normal (conjugating element {witness})"),
            Error::NotHomomorphism { g, h } => write!(f, "not a homomorphism at pair ({g}, {h})"),
            Error::OverlappingTranslates { a, b } => {
                write!(f, "translates of the window overlap for elements {a} and {b}")
            }
            Error::ZeroBudget => write!(f, "estimation budget must be positive"),
            Error::IntervalNotClosed { lower, upper } => {
                write!(f, "bisection stopped with bracket [{lower:.6e}, {upper:.6e}]")
            }
            Error::InvalidInput(msg) => write!(f, "{msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub(crate) fn invalid(msg: &str) -> Error {
    Error::InvalidInput(String::from(msg))
}
