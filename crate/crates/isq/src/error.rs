use thiserror::Error;

/// Errors surfaced by the numerical layers of the crate.
#[derive(Debug, Error)]
pub enum IsqError {
    #[error("invalid physical parameters: {0}")]
    InvalidParams(String),

    #[error("matrix is not unitary: ||U^H U - I|| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("series for {what} did not converge within {terms} terms (|z| = {z_abs:.3e})")]
    SeriesDivergence {
        what: &'static str,
        terms: usize,
        z_abs: f64,
    },

    #[error("bessel_i: unsupported argument region (nu = {nu}, |z| = {z_abs:.3e})")]
    BesselArgument { nu: f64, z_abs: f64 },

    #[error("quadrature did not reach the requested tolerance (estimate {estimate:.3e}, error {error:.3e})")]
    QuadratureNoConvergence { estimate: f64, error: f64 },

    #[error("root count mismatch in interval ({lo}, {hi}): found {found}, expected {expected}")]
    RootCount {
        lo: f64,
        hi: f64,
        found: usize,
        expected: usize,
    },

    #[error("boundary-condition kernel has rank deficiency {dim}, expected a one-dimensional kernel")]
    KernelRank { dim: usize },

    #[error("series-2 state does not exist at a = 1 (normalization constant degenerates)")]
    SeriesTwoDegenerate,

    #[error("caustic time: |sin(omega T)| = {sin_abs:.3e} is below threshold; use the caustic-time path")]
    CausticTime { sin_abs: f64 },

    #[error("spectral-sum tail estimate {tail:.3e} exceeds the requested tolerance {tol:.3e}")]
    SpectralTail { tail: f64, tol: f64 },

    #[error("truncation residual {residual:.3e} exceeds the requested tolerance {tol:.3e}")]
    TruncationResidual { residual: f64, tol: f64 },

    #[error("classical trajectory: {0}")]
    Classical(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("boundary-vector extrapolation disagreement: analytic {analytic:.6e}, numeric {numeric:.6e}")]
    WronskianMismatch { analytic: f64, numeric: f64 },

    #[error("self-test failed: {failed} of {total} checks")]
    SelfTest { failed: usize, total: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, IsqError>;
