use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature did not converge: estimated error {estimate:.3e} exceeds requested {requested:.3e}")]
    QuadratureNonConvergence { estimate: f64, requested: f64 },

    #[error("matrix is singular or nearly so (condition estimate {condition:.3e})")]
    NearSingular { condition: f64 },

    #[error("self-energy pole at omega = {omega} with zero linewidth")]
    ResonantZeroLinewidth { omega: f64 },

    #[error("no soft-mode root bracketed in ({lo}, {hi}]")]
    RootNotBracketed { lo: f64, hi: f64 },

    #[error("correlation spectrum at omega = {omega} has imaginary residue {residue:.3e} (value {value:.3e})")]
    ConventionViolation { omega: f64, value: f64, residue: f64 },

    #[error("negative population {value:.3e}")]
    NegativePopulation { value: f64 },

    #[error("coupling y = {y} is not below the critical coupling {y_c}")]
    AboveThreshold { y: f64, y_c: f64 },

    #[error("density table: {0}")]
    Table(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidParameter { .. } | Error::Table(_) | Error::AboveThreshold { .. })
    }
}
