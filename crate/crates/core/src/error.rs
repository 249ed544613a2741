//! Error type shared by all simulator modules.

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("port out of range: port {port} on a {count}-port basis")]
    PortOutOfRange { port: usize, count: usize },

    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("reck_decompose requires unitary: deviation max-norm {deviation:.3e} exceeds {tolerance:.1e}")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("permanent size guard: n = {n} exceeds limit {limit}")]
    PermanentSizeGuard { n: usize, limit: usize },

    #[error("post-selection has zero success amplitude")]
    ZeroPostSelection,

    #[error("cannot take the Schmidt decomposition of a zero matrix")]
    ZeroMatrix,

    #[error("cannot equalize a rank-deficient state: numerical rank {rank} < dimension {dim}")]
    RankDeficient { rank: usize, dim: usize },

    #[error(
        "grid under-resolved: oracle mismatch {mismatch:.2e} exceeds 5%; \
         suggested points >= {suggested_points}, extent = {suggested_extent}"
    )]
    GridUnderResolved {
        mismatch: f64,
        suggested_points: usize,
        suggested_extent: f64,
    },

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
