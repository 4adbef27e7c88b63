use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("plane dimensions must be positive, got {rows}x{cols}")]
    EmptyPlane { rows: usize, cols: usize },

    #[error("data length {len} does not match a {rows}x{cols} plane")]
    BadLength {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),

    #[error("non-finite value in input data")]
    NonFinite,

    #[error("non-finite values after solver iteration {0}")]
    NonFiniteAtIteration(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("atmospheric light {a} is below the channel maximum {max}")]
    AtmosphericTooLow { a: f64, max: f64 },

    #[error("box lower bound must be nonpositive, found {0}")]
    BoundAboveZero(f64),

    #[error("expected 1 or 3 channels, got {0}")]
    ChannelCount(usize),

    #[error("channel shapes differ within one image")]
    ChannelShapes,

    #[error("outer iteration {outer}: {source}")]
    OuterIteration {
        outer: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
