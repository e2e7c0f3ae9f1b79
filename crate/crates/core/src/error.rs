use std::io;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unsupported field GF(2^{0}); supported m is 1..=5")]
    UnsupportedField(u32),
    #[error("field domain error: {0}")]
    Domain(&'static str),
    #[error("unsupported degree pair ({dv},{dc}); supported pairs are (2,4), (3,6), (3,9), (3,12)")]
    UnsupportedDegrees { dv: usize, dc: usize },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("index out of range: {0}")]
    Range(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("oracle budget exceeded: {0}")]
    Budget(String),
    #[error("bracket [{lo}, {hi}] dB does not contain the target BER; widen the bounds")]
    Bracket { lo: f64, hi: f64 },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
