use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates the domain of an operation.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The leaky-mirror model only holds for τ ≪ 1.
    #[error("leak parameter τ = {tau} outside the leaky-mirror regime 0 < τ ≤ {max} (the model assumes τ ≪ 1)")]
    LeakyRegime { tau: f64, max: f64 },

    /// A truncated mode sum does not reach the requested frequency.
    #[error("mode sum truncated at n = {n_max} does not bracket ω/ω_c = {u}")]
    Truncation { n_max: u32, u: f64 },

    #[error("adaptive quadrature did not converge: value {value:e}, error estimate {error:e}")]
    QuadratureFailed { value: f64, error: f64 },

    #[error("optimal profile is undefined: total form-factor vanishes at f/ω_c = {v}")]
    UndefinedProfile { v: f64 },

    #[error("peak fit failed: {0}")]
    Fit(String),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
