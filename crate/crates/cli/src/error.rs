use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at '{key}': {message}")]
    Config { key: String, message: String },
    #[error("missing upstream artifact {path}: {hint}")]
    Dependency { path: String, hint: String },
    #[error("check failed: {0}")]
    Check(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(_) => 1,
            CliError::Config { .. } | CliError::Dependency { .. } | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

macro_rules! numerical {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Numerical(e.to_string())
            }
        }
    )*};
}

numerical!(circuit_core::CircuitError, transmon_map::TransmonError, bath_synthesis::SynthesisError, dynamics::DynamicsError);

impl From<rotating_frame::FrameError> for CliError {
    fn from(e: rotating_frame::FrameError) -> Self {
        use rotating_frame::FrameError as F;
        match e {
            F::ResonanceMismatch { .. } | F::DegenerateDrive | F::InvalidDrive(_) => CliError::Config { key: "drive".into(), message: e.to_string() },
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
