use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("weights and slopes must have equal length >= 2")]
    BadExpSum,
    #[error("all weights must be strictly positive and finite")]
    NonpositiveWeight,
    #[error("slopes must be finite")]
    NonfiniteSlope,
    #[error("magnitude overflow evaluating exponential sum")]
    MagnitudeOverflow,
    #[error("degenerate: zero slope spread, no zeros, infinite radius")]
    DegenerateSpread,
    #[error("zero search exhausted inside strip Im(t) in [{lo}, {hi}]")]
    SearchExhausted { lo: f64, hi: f64 },
    #[error("argument-principle check found {0} zeros below the returned modulus")]
    MinimalityFailed(i64),
    #[error("contour too close to a zero, perturb radius")]
    ContourNearZero,
    #[error("top-2 degenerate: zero top-2 slope gap, infinite per-sample radius")]
    TopTwoDegenerate,
    #[error("invalid temperature")]
    InvalidTemperature,
    #[error("no samples")]
    NoSamples,
    #[error("no preactivations")]
    NoPreactivations,
    #[error("zero direction")]
    ZeroDirection,
    #[error("numeric overflow at layer {0}")]
    LayerOverflow(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("malformed input at line {0}: {1}")]
    Malformed(usize, String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}
