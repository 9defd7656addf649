use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid mesh, partition or scenario parameters.
    Config(&'static str),
    IndexOutOfRange { index: usize, len: usize },
    UnsupportedRule { kind: &'static str, points: usize },
    UnsupportedDerivative { order: usize },
    /// The stiffness coefficient must be strictly positive.
    NonPositiveCoefficient { x: f64, y: f64, value: f64 },
    /// A pivot fell below the singularity threshold during factorization.
    Singular { pivot: usize },
    DimensionMismatch { expected: usize, found: usize },
    TimeOutOfRange { t: f64, start: f64, end: f64 },
    SensorOutsideDomain,
    /// A solve left a relative residual above the accepted bound.
    Inaccurate { residual: f64 },
    /// A time step failed; carries the 1-based interval index.
    Step { interval: usize, source: alloc::boxed::Box<Error> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range (length {len})")
            }
            Error::UnsupportedRule { kind, points } => {
                write!(f, "unsupported {kind} rule with {points} points")
            }
            Error::UnsupportedDerivative { order } => {
                write!(f, "derivatives of total order {order} are not supported")
            }
            Error::NonPositiveCoefficient { x, y, value } => {
                write!(f, "coefficient {value} at ({x}, {y}) is not positive")
            }
            Error::Singular { pivot } => write!(f, "matrix is singular at pivot {pivot}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::TimeOutOfRange { t, start, end } => {
                write!(f, "time {t} outside [{start}, {end}]")
            }
            Error::Inaccurate { residual } => write!(f, "relative residual {residual:e} exceeds tolerance"),
            Error::SensorOutsideDomain => write!(f, "sensor region is not inside the domain"),
            Error::Step { interval, source } => {
                write!(f, "time step {interval} failed: {source}")
            }
        }
    }
}

impl core::error::Error for Error {}
