use mrflab_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    ResourceLimit(String),
    #[error("{0}")]
    Sampler(String),
    #[error("{0}")]
    CheckFailed(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn from_core(e: CoreError) -> Self {
        let message = e.to_string();
        match e.root() {
            CoreError::InvalidArgument(_) | CoreError::Unsupported(_) => CliError::Validation(message),
            CoreError::ResourceLimit { .. } => CliError::ResourceLimit(message),
            CoreError::NoCoalescence { .. } | CoreError::GridPoint { .. } => CliError::Sampler(message),
        }
    }

    /// Prefixes the message with the config path it concerns.
    pub fn context(self, path: impl AsRef<str>) -> Self {
        let path = path.as_ref();
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{path}: {m}")),
            CliError::ResourceLimit(m) => CliError::ResourceLimit(format!("{path}: {m}")),
            CliError::Sampler(m) => CliError::Sampler(format!("{path}: {m}")),
            other => other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::ResourceLimit(_) => 3,
            CliError::Sampler(_) => 4,
            CliError::CheckFailed(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::from_core(e)
    }
}
