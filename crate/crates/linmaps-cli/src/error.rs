use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or values; exit code 2.
    #[error("usage: {0}")]
    Usage(String),
    /// Unreadable or malformed input files; exit code 2.
    #[error("input: {0}")]
    Input(String),
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    /// Inputs the library rejects, such as an order above the maximal rank; exit code 2.
    #[error(transparent)]
    Library(Box<dyn std::error::Error + Send + Sync>),
}

impl CliError {
    pub fn library(e: impl std::error::Error + Send + Sync + 'static) -> Self {
        CliError::Library(Box::new(e))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) | CliError::Library(_) => 2,
            CliError::Output(_) | CliError::Json(_) => 1,
        }
    }
}
