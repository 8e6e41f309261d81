use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{n_sites} sites exceeds the supported maximum of {max}")]
    TooManySites { n_sites: usize, max: usize },
    #[error("no sector with {n_up} up spins on {n_sites} sites")]
    InvalidSector { n_sites: usize, n_up: usize },
    #[error("magnetization {magnetization} is not a valid sector label for {n_sites} sites")]
    InvalidMagnetization { n_sites: usize, magnetization: f64 },
    #[error("binomial coefficient C({n}, {k}) overflows u64")]
    Overflow { n: usize, k: usize },
    #[error("bitstring {bits:#b} has popcount {found}, expected {expected}")]
    WrongPopcount { bits: u64, found: u32, expected: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("site {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("projection onto site {site} up is empty")]
    EmptyProjection { site: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("background magnetization M_B = 1/2 makes the quasi-probability undefined")]
    DegenerateBackground,
    #[error("traces do not share a time schedule")]
    ScheduleMismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("exponent fit failed: {0}")]
    Fit(String),
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
