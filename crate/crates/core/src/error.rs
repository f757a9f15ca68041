use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Polynomial or wavefunction order beyond the supported range.
    OrderOutOfRange { order: usize, max: usize },
    /// A dimension that must be positive was zero.
    ZeroDimension,
    DimensionMismatch { expected: usize, found: usize },
    /// Amplitudes that cannot be normalized (all zero or non-finite).
    NotNormalizable,
    NotHermitian { max_deviation: f64 },
    TraceNotOne { trace: f64 },
    NegativeEigenvalue { min_eigenvalue: f64 },
    /// The requested state leaks more than the allowed probability outside the truncation.
    TruncationTooSmall { dim: usize, leakage: f64 },
    DegenerateDistribution,
    IncompleteDistribution { total: f64 },
    InvalidParameter(&'static str),
    WindowOutsidePeriod,
    EmptyInput,
    ZeroVariance,
    EmptyData,
    /// A histogram bin with counts was assigned (numerically) zero probability.
    ZeroProbabilityBin { theta: f64, x: f64, probability: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OrderOutOfRange { order, max } => {
                write!(f, "order {order} out of supported range (< {max})")
            }
            Error::ZeroDimension => write!(f, "dimension must be at least 1"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotNormalizable => write!(f, "amplitudes cannot be normalized"),
            Error::NotHermitian { max_deviation } => {
                write!(f, "matrix is not Hermitian (max |ρ - ρ†| = {max_deviation:e})")
            }
            Error::TraceNotOne { trace } => write!(f, "trace is {trace}, expected 1"),
            Error::NegativeEigenvalue { min_eigenvalue } => {
                write!(f, "matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")
            }
            Error::TruncationTooSmall { dim, leakage } => {
                write!(f, "truncation dim {dim} too small: leakage {leakage:e}")
            }
            Error::DegenerateDistribution => write!(f, "mean photon number is zero"),
            Error::IncompleteDistribution { total } => {
                write!(f, "photon distribution sums to {total}, expected > 0.99")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::WindowOutsidePeriod => write!(f, "integration window lies outside the pulse period"),
            Error::EmptyInput => write!(f, "empty input"),
            Error::ZeroVariance => write!(f, "blocked-signal integrals have zero second moment"),
            Error::EmptyData => write!(f, "no quadrature records"),
            Error::ZeroProbabilityBin { theta, x, probability } => write!(
                f,
                "bin at theta = {theta}, x = {x} has counts but probability {probability:e}; \
                 truncation too small or x range mismatched"
            ),
        }
    }
}

impl core::error::Error for Error {}
