use bellscope_core::Error as CoreError;

/// Failures surfaced by the command line, each with a stable exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed or inconsistent configuration, bad flags, unwritable output.
    #[error("config error: {0}")]
    Config(String),
    /// The model descriptor is invalid or cannot serve the request.
    #[error("model error: {0}")]
    Model(String),
    /// A verification check failed; the message names it.
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(_) => 1,
            CliError::Config(_) => 2,
            CliError::Model(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::MissingAngle { .. }
            | CoreError::WrongParty { .. }
            | CoreError::NotAngleParameterized(_)
            | CoreError::InvalidDistribution(_)
            | CoreError::InvalidModel(_)
            | CoreError::EmptySelection(_) => CliError::Model(e.to_string()),
            CoreError::InvalidSettings(_)
            | CoreError::InvalidArgument(_)
            | CoreError::Parse(_)
            | CoreError::Io(_)
            | CoreError::Csv(_)
            | CoreError::Json(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
