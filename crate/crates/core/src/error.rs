use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("degenerate track: {0}")]
    DegenerateTrack(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unsupported track kind `{0}`")]
    UnsupportedKind(String),

    #[error("track too narrow: margin {margin} >= half-width {half_width} at point {index}")]
    TrackTooNarrow { index: usize, margin: f64, half_width: f64 },

    #[error("integration diverged: non-finite state {0}")]
    IntegrationDiverged(String),

    #[error("window not warm: {seen} of {needed} steps observed")]
    WindowNotWarm { seen: usize, needed: usize },

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
