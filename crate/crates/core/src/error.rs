use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// Cells per direction must be positive.
    InvalidResolution(usize),
    /// Polynomial degree outside what the operation supports.
    InvalidDegree { degree: usize, min: usize },
    /// Input polynomial of higher degree than the operation accepts.
    DegreeTooHigh { degree: usize, max: usize },
    /// Gauss rule point count outside `1..=32`.
    QuadratureOutOfRange(usize),
    /// Fractional order outside `(0, 1]`.
    OrderOutOfRange(f64),
    NonPositiveStep(f64),
    NonPositivePenalty(f64),
    NonPositiveShift(f64),
    /// `T / tau` is not an integer.
    NonIntegralSteps { t_final: f64, tau: f64 },
    /// Step index outside the range covered by the weights or the history.
    StepOutOfRange { step: usize, available: usize },
    /// Two fields (or a field and a vector) live on different discretisations.
    ShapeMismatch { expected: usize, found: usize },
    /// LU elimination met a zero (or non-finite) pivot.
    SingularPivot { index: usize },
    /// A data discontinuity does not lie on a mesh line.
    MisalignedDiscontinuity { coordinate: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidResolution(n) => write!(f, "invalid resolution N={n}, need N >= 1"),
            Error::InvalidDegree { degree, min } => {
                write!(f, "polynomial degree {degree} not supported, need >= {min}")
            }
            Error::DegreeTooHigh { degree, max } => {
                write!(f, "polynomial degree {degree} exceeds the allowed {max}")
            }
            Error::QuadratureOutOfRange(q) => {
                write!(f, "gauss rule with {q} points requested, supported range is 1..=32")
            }
            Error::OrderOutOfRange(a) => write!(f, "fractional order {a} outside (0, 1]"),
            Error::NonPositiveStep(t) => write!(f, "time step {t} must be positive"),
            Error::NonPositivePenalty(p) => write!(f, "penalty {p} must be positive"),
            Error::NonPositiveShift(d) => write!(f, "leading weight {d} must be positive"),
            Error::NonIntegralSteps { t_final, tau } => {
                write!(f, "T={t_final} is not an integer multiple of tau={tau}")
            }
            Error::StepOutOfRange { step, available } => {
                write!(f, "step {step} out of range (have {available})")
            }
            Error::ShapeMismatch { expected, found } => {
                write!(f, "shape mismatch: expected {expected} coefficients, found {found}")
            }
            Error::SingularPivot { index } => {
                write!(f, "factorization failed: zero pivot at row {index}")
            }
            Error::MisalignedDiscontinuity { coordinate } => {
                write!(f, "discontinuity at {coordinate} is not on a mesh line")
            }
        }
    }
}

impl core::error::Error for Error {}
