use thiserror::Error;

/// Failures raised by the simulation routines.
///
/// Numeric failures (singular poles, vanishing flux) are kept distinct from
/// parameter validation so callers can map them to different exit paths.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operation requires equal waveguide decay rates (got {gamma_1d_1} and {gamma_1d_2})")]
    AsymmetricInput { gamma_1d_1: f64, gamma_1d_2: f64 },

    #[error("singular resolvent at delta = {delta}: an eigenvalue is exactly zero")]
    SingularResolvent { delta: f64 },

    #[error("closed form for the {requested} case requested but kad = {kad}")]
    WrongCase { requested: &'static str, kad: f64 },

    #[error("spectrum has no valid reflection samples")]
    EmptySpectrum,

    #[error("singular steady state: {0}")]
    SingularSteadyState(&'static str),

    #[error("zero reflected flux")]
    ZeroFlux,

    #[error("Liouvillian steady state not resolved: {0}")]
    NonConvergedSteadyState(String),

    #[error("weak-drive condition violated: omega_p = {omega_p} exceeds {limit}")]
    WeakDriveViolated { omega_p: f64, limit: f64 },

    #[error("no narrow spectral feature found near delta = {expected}")]
    FeatureNotFound { expected: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for numeric failures (as opposed to rejected input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::SingularResolvent { .. }
                | Error::EmptySpectrum
                | Error::SingularSteadyState(_)
                | Error::ZeroFlux
                | Error::NonConvergedSteadyState(_)
                | Error::FeatureNotFound { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
