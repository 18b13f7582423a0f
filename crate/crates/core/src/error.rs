use thiserror::Error;

/// Errors raised by contour construction, solving, and verification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("InvalidField: Hopf direction ({0}, {1}, {2}) is not unit length")]
    InvalidField(f64, f64, f64),

    #[error("InvalidPolygon: {0}")]
    InvalidPolygon(String),

    #[error("InvalidPoint: start point is not on the unit 3-sphere (norm {0})")]
    InvalidPoint(f64),

    #[error("CalibrationFailure: {0}")]
    CalibrationFailure(String),

    #[error("DomainError: {0}")]
    Domain(String),

    #[error("InvalidSubstitution: {0}")]
    InvalidSubstitution(String),

    #[error("NotALawsonQuadrilateral: {0}")]
    NotALawsonQuadrilateral(String),

    #[error("NoSolution: {0}")]
    NoSolution(String),

    #[error("ConvergenceFailure: {0}")]
    ConvergenceFailure(String),

    #[error("IncompatibleQuadrilaterals: {0}")]
    IncompatibleQuadrilaterals(String),

    #[error("NotARectangularContour: {0}")]
    NotARectangularContour(String),

    #[error("NoInteriorRoot: r = {r} is not below R(alpha) = {r_bound}")]
    NoInteriorRoot { r: f64, r_bound: f64 },

    #[error("IncompatiblePair: {0}")]
    IncompatiblePair(String),

    #[error("NeedMoreExtension: s = {s} does not exceed b = {b}")]
    NeedMoreExtension { s: f64, b: f64 },

    #[error("InvalidLoop: {0}")]
    InvalidLoop(String),

    #[error("AmbiguousPath: step {index} has length {step} (threshold {threshold})")]
    AmbiguousPath {
        index: usize,
        step: f64,
        threshold: f64,
    },
}

impl Error {
    /// The bare variant name, as reported by the command line front end.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidField(..) => "InvalidField",
            Error::InvalidPolygon(_) => "InvalidPolygon",
            Error::InvalidPoint(_) => "InvalidPoint",
            Error::CalibrationFailure(_) => "CalibrationFailure",
            Error::Domain(_) => "DomainError",
            Error::InvalidSubstitution(_) => "InvalidSubstitution",
            Error::NotALawsonQuadrilateral(_) => "NotALawsonQuadrilateral",
            Error::NoSolution(_) => "NoSolution",
            Error::ConvergenceFailure(_) => "ConvergenceFailure",
            Error::IncompatibleQuadrilaterals(_) => "IncompatibleQuadrilaterals",
            Error::NotARectangularContour(_) => "NotARectangularContour",
            Error::NoInteriorRoot { .. } => "NoInteriorRoot",
            Error::IncompatiblePair(_) => "IncompatiblePair",
            Error::NeedMoreExtension { .. } => "NeedMoreExtension",
            Error::InvalidLoop(_) => "InvalidLoop",
            Error::AmbiguousPath { .. } => "AmbiguousPath",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
