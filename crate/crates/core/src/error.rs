use thiserror::Error;

/// Errors raised by the toolkit. Numerical diagnostics that are not fatal
/// (boundary leakage, unstable fits) travel as flags on the results instead.
#[derive(Debug, Error)]
pub enum QhaError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("hermite sizing rule violated for N={n}: need T >= {t_min:.4} and M_t >= {m_min} (got T={t}, M_t={m})")]
    Sizing { n: usize, t: f64, m: usize, t_min: f64, m_min: usize },

    #[error("basis fingerprint mismatch ({0:016x} vs {1:016x})")]
    FingerprintMismatch(u64, u64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("validation gate failed: {0}")]
    Gate(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("corrupt data: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, QhaError>;

pub(crate) fn invalid(msg: impl Into<String>) -> QhaError {
    QhaError::InvalidArgument(msg.into())
}
