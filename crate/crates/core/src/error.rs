use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// The variants are grouped so that front ends can map them onto stable
/// exit codes (see [`Error::kind`]).
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("precision of {digits} digits is below the minimum of {min} digits")]
    PrecisionTooLow { digits: u32, min: u32 },

    #[error(
        "precision budget refused: epsilon = {epsilon} needs at least {required} digits, got {digits}"
    )]
    PrecisionBudget {
        digits: u32,
        required: u32,
        epsilon: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {value} lies outside {range}")]
    OutOfRange {
        what: &'static str,
        value: String,
        range: String,
    },

    #[error("domain error in `{expr}`: {reason}")]
    Domain { expr: String, reason: String },

    #[error("critical point: |f'| of branch {branch} at x = {x} is {value}")]
    CriticalPoint {
        branch: String,
        x: String,
        value: String,
    },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown function `{name}` at line {line}, column {column}")]
    UnknownFunction {
        name: String,
        line: usize,
        column: usize,
    },

    #[error("invalid map definition: {0}")]
    InvalidMap(String),

    #[error("unknown map `{0}`")]
    UnknownMap(String),

    #[error("map `{name}` is not expanding: certified floor {floor} <= 1")]
    NotExpanding { name: String, floor: String },

    #[error("collocation matrix entry ({j}, {k}) is not finite")]
    NonFinite { j: usize, k: usize },

    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual})"
    )]
    NonConvergence { iterations: usize, residual: String },

    #[error("positivity failure: {0}")]
    Positivity(String),

    #[error(
        "certificate refused: insufficient analytic resolution (tail ratio {tail_ratio} > {threshold}); raise m or K"
    )]
    CertificateRefused {
        tail_ratio: String,
        threshold: String,
    },

    #[error("epsilon too large for this m/digits: alpha = {alpha}, beta = {beta}")]
    EpsilonTooLarge { alpha: String, beta: String },

    #[error("certificate violation: sampled ratio {sample} at x = {x} exceeds bound {bound}")]
    CertificateViolation {
        sample: String,
        bound: String,
        x: String,
    },
}

/// Coarse classification of [`Error`], stable across releases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    Input,
    Precision,
    Evaluation,
    Positivity,
    Certificate,
    NonConvergence,
    Epsilon,
    Violation,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Input => "input",
            ErrorKind::Precision => "precision",
            ErrorKind::Evaluation => "evaluation",
            ErrorKind::Positivity => "positivity",
            ErrorKind::Certificate => "certificate",
            ErrorKind::NonConvergence => "non_convergence",
            ErrorKind::Epsilon => "epsilon",
            ErrorKind::Violation => "violation",
        }
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::PrecisionTooLow { .. } | Error::PrecisionBudget { .. } => ErrorKind::Precision,
            Error::InvalidArgument(_)
            | Error::OutOfRange { .. }
            | Error::Syntax { .. }
            | Error::UnknownFunction { .. }
            | Error::InvalidMap(_)
            | Error::UnknownMap(_)
            | Error::NotExpanding { .. } => ErrorKind::Input,
            Error::Domain { .. } | Error::CriticalPoint { .. } | Error::NonFinite { .. } => {
                ErrorKind::Evaluation
            }
            Error::NonConvergence { .. } => ErrorKind::NonConvergence,
            Error::Positivity(_) => ErrorKind::Positivity,
            Error::CertificateRefused { .. } => ErrorKind::Certificate,
            Error::EpsilonTooLarge { .. } => ErrorKind::Epsilon,
            Error::CertificateViolation { .. } => ErrorKind::Violation,
        }
    }
}
