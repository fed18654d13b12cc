use thiserror::Error;

/// Errors raised across the simulator, optimizer, and spectral analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized: |s|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("{n_qubits} qubits exceeds the dense expansion limit of {max}")]
    Capacity { n_qubits: usize, max: usize },

    #[error("out of domain: {0}")]
    Domain(String),

    #[error("parameter slot {slot} is unbound")]
    UnboundParameter { slot: usize },

    #[error("expected {expected} parameters, got {found}")]
    Arity { expected: usize, found: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("line ordering: {0}")]
    Ordering(String),

    #[error("inconsistent spectrum: {0}")]
    InconsistentSpectrum(String),

    #[error("line spacings disagree: {what} estimates {first} Hz and {second} Hz differ by more than {tolerance} Hz")]
    SpacingMismatch {
        what: &'static str,
        first: f64,
        second: f64,
        tolerance: f64,
    },

    #[error("mixing angle undefined for equal frequencies with zero coupling")]
    UndefinedAngle,

    #[error("matrix is not Hermitian at ({row}, {col})")]
    NotHermitian { row: usize, col: usize },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("objective returned a non-finite value at theta = {theta:?}")]
    NonFinite { theta: Vec<f64> },

    #[error("energy {energy} Hz lies below the exact ground energy {ground} Hz")]
    VariationalBound { energy: f64, ground: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line tool: 2 usage, 3 data, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InconsistentSpectrum(_)
            | Error::SpacingMismatch { .. }
            | Error::UndefinedAngle => 3,
            Error::NotNormalized { .. }
            | Error::NoConvergence { .. }
            | Error::NonFinite { .. }
            | Error::VariationalBound { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
