use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("resolution: {0}")]
    Resolution(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("{count} samples outside the domain (first indices {first:?})")]
    OutOfDomain { count: usize, first: Vec<usize> },
    #[error("smoothing reached eps = {eps} with sup gap {gap:e} >= margin {margin:e}")]
    SmoothingFloor { eps: f64, gap: f64, margin: f64 },
    #[error("contour quadrature did not converge: doubling nodes moved the result by {drift:e}")]
    QuadratureNonConvergence { drift: f64 },
    #[error("postcondition failed: {0}")]
    Postcondition(String),
    #[error("lambda is in the joint range: distance {distance:e}, min u_lambda {min_u_lambda:e}")]
    LambdaInSpectrum { distance: f64, min_u_lambda: f64 },
    #[error("singular value decomposition did not converge")]
    SvdNonConvergence,
    #[error("bad magic: expected FLD1, found {0:?}")]
    MagicMismatch([u8; 4]),
    #[error("unsupported FLD1 version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated payload: needed {needed} bytes, found {found}")]
    Truncated { needed: usize, found: usize },
    #[error("dimension overflow: {0}")]
    DimensionOverflow(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
