use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("self-test failed: {0} check(s) did not pass")]
    SelftestFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::SelftestFailed(_) => EXIT_SELFTEST,
        }
    }
}

impl From<planarcav::Error> for CliError {
    fn from(e: planarcav::Error) -> Self {
        use planarcav::Error as E;
        match e {
            E::InvalidParameter { .. } | E::LeakyRegime { .. } | E::Config(_) | E::UndefinedProfile { .. } => {
                CliError::Config(e.to_string())
            }
            E::Truncation { .. } | E::QuadratureFailed { .. } | E::Fit(_) => CliError::Numerical(e.to_string()),
        }
    }
}
