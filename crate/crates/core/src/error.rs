use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not complex symmetric (relative asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("{0} did not converge")]
    ConvergenceFailure(&'static str),

    #[error("coefficient matrix has norm {norm} (outside tolerance, renormalization not requested)")]
    NotNormalized { norm: f64 },

    #[error("coefficient matrix is zero")]
    ZeroState,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("bad matrix shape: {0}")]
    BadShape(String),

    #[error("density matrix trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("spectrum does not match profile m={m}, n={n}: {diagnostic}")]
    ProfileMismatch {
        m: usize,
        n: usize,
        diagnostic: String,
    },

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("bad spectrum: {0}")]
    BadSpectrum(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("degenerate point: |dD/dt| = {slope:.3e}")]
    DegeneratePoint { slope: f64 },

    #[error("point is off the normalized curve (residual {residual:.3e})")]
    OffCurve { residual: f64 },

    #[error("bad index ({i},{p},{j},{q}) for N={dim}")]
    BadIndex {
        i: usize,
        p: usize,
        j: usize,
        q: usize,
        dim: usize,
    },

    #[error("rank violation: fifth singular value {fifth:.3e} exceeds 1e-8")]
    RankViolation { fifth: f64 },

    #[error("unsupported eigenvalue family for n={n}")]
    UnsupportedFamily { n: usize },

    #[error("density matrix is not supported on the form-(a) subspace (leak {leak:.3e})")]
    NotFormA { leak: f64 },

    #[error("matrix is not an isometry (residual {residual:.3e})")]
    NotIsometry { residual: f64 },

    #[error("bad rank {rank}: {reason}")]
    BadRank { rank: usize, reason: &'static str },
}

impl Error {
    /// Errors caused by floating point trouble rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure(_)
                | Error::NumericalInconsistency(_)
                | Error::RankViolation { .. }
                | Error::DegeneratePoint { .. }
        )
    }
}
