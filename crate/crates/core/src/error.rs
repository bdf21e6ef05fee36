use std::fmt;

/// Errors surfaced by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or inconsistent parameters (bad modulus shape, size
    /// mismatches, invalid √élu parameters, ...).
    Parameter(String),
    /// Inversion of zero.
    DivisionByZero,
    /// A prime is missing from the DAC map.
    MissingPrime(u64),
    /// The deterministic x-scan exhausted its bound without finding a point.
    PointSearchFailure(String),
    /// A kernel point does not have the claimed prime order.
    KernelOrder(String),
    /// The kernel evaluation degenerated (zero denominator in the codomain).
    DegenerateKernel,
    /// A batch configuration violates its validity rules.
    InvalidConfig(String),
    /// The greedy search found no valid configuration.
    SearchFailure(String),
    /// A peer public key failed validation.
    InvalidPublicKey(String),
    /// An intermediate point of the group action had the wrong order,
    /// signalling a faulted or inconsistent evaluation.
    EvaluationIntegrity(String),
    /// Malformed input file.
    Format(String),
    /// Underlying I/O failure.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(m) => write!(f, "parameter error: {m}"),
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::MissingPrime(p) => write!(f, "prime {p} missing from DAC map"),
            Error::PointSearchFailure(m) => write!(f, "point search failure: {m}"),
            Error::KernelOrder(m) => write!(f, "kernel order error: {m}"),
            Error::DegenerateKernel => write!(f, "degenerate kernel evaluation"),
            Error::InvalidConfig(m) => write!(f, "invalid batch configuration: {m}"),
            Error::SearchFailure(m) => write!(f, "search failure: {m}"),
            Error::InvalidPublicKey(m) => write!(f, "invalid public key: {m}"),
            Error::EvaluationIntegrity(m) => write!(f, "evaluation integrity error: {m}"),
            Error::Format(m) => write!(f, "format error: {m}"),
            Error::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
