use std::fmt;

/// Crate-wide error type. Each variant identifies a specific contract
/// violation so callers (and the CLI exit-code mapping) can tell config
/// errors from runtime failures.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EtaOutOfRange(f64),
    TooFewLinesPerRound { eta: f64, n: usize, rounds: usize },
    UnknownCase(u32),
    NonSquareImage { height: usize, width: usize },
    NonFiniteImage,
    NonPowerOfTwoSize(usize),
    DimensionMismatch { expected: usize, got: usize },
    AllZeroReference,
    GridTooLarge { n: usize, limit: usize },
    SingularDesign,
    NotEnoughLines { requested: usize, available: usize },
    EmptyMask,
    Diverged,
    ZeroReferenceEnergy,
    ZeroTruth,
    TumorOutOfBounds,
    UnsupportedFormat(String),
    ConfigParse(String),
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EtaOutOfRange(eta) => write!(f, "eta {eta} is outside (0, 1]"),
            Error::TooFewLinesPerRound { eta, n, rounds } => write!(
                f,
                "eta*n = {:.3} lines cannot cover {rounds} rounds of at least one line each",
                eta * *n as f64
            ),
            Error::UnknownCase(id) => write!(f, "unknown case id {id} (valid: 1..=22)"),
            Error::NonSquareImage { height, width } => {
                write!(f, "image must be square, got {height}x{width}")
            }
            Error::NonFiniteImage => write!(f, "image contains non-finite pixel values"),
            Error::NonPowerOfTwoSize(n) => {
                write!(f, "wavelet transform needs a power-of-two size, got {n}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::AllZeroReference => write!(f, "reference k-space is identically zero"),
            Error::GridTooLarge { n, limit } => {
                write!(f, "grid size {n} exceeds the dense-design limit {limit}")
            }
            Error::SingularDesign => {
                write!(f, "design objective is infinite for every feasible selection")
            }
            Error::NotEnoughLines { requested, available } => {
                write!(f, "requested {requested} lines but only {available} remain")
            }
            Error::EmptyMask => write!(f, "sampling mask is empty"),
            Error::Diverged => write!(f, "solver diverged (non-finite residual)"),
            Error::ZeroReferenceEnergy => {
                write!(f, "reference has zero energy on the sampled lines")
            }
            Error::ZeroTruth => write!(f, "ground-truth image has zero norm"),
            Error::TumorOutOfBounds => write!(f, "tumor region does not fit inside the grid"),
            Error::UnsupportedFormat(msg) => write!(f, "unsupported image format: {msg}"),
            Error::ConfigParse(msg) => write!(f, "config error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
