use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("under-resolved initial data: {0}")]
    UnderResolved(String),
    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("time step {dt:e} fell below the floor {dt_min:e} (max wave speed {max_speed:e})")]
    BlowupSuspected { dt: f64, dt_min: f64, max_speed: f64 },
    #[error("NaN produced during step at t = {t}: {detail}")]
    StepFailed { t: f64, detail: String },
    #[error("degenerate window: {0}")]
    DegenerateWindow(String),
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
    #[error("snapshot format: {0}")]
    Format(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
