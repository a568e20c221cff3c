use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("kernel not positive semidefinite on grid (jitter {jitter:e} exhausted at row {row})")]
    NotPositiveSemidefinite { jitter: f64, row: usize },

    #[error("eigenvalue iteration did not converge for index {index} after {iterations} sweeps")]
    EigenConvergence { index: usize, iterations: usize },

    #[error("principal eigenvector changes sign at node {node}")]
    EigenvectorSign { node: usize },

    #[error("overflow: lambda^2 t too large for direct simulation (lambda = {lambda}, t = {t})")]
    Overflow { lambda: f64, t: f64 },

    #[error("exponential factor overflows: lambda * B_t = {exponent:.3} exceeds the representable range")]
    ExactSamplerOverflow { exponent: f64 },

    #[error("renewal solution left the representable range at t = {t}; use the log-domain solver")]
    RenewalOverflow { t: f64 },

    #[error("lambda grid too small for double-log fit: energy {energy:.4e} <= e at lambda = {lambda}")]
    EnergyTooSmall { lambda: f64, energy: f64 },
}

impl Error {
    pub fn is_overflow(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. } | Error::ExactSamplerOverflow { .. } | Error::RenewalOverflow { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
