use heegner_core::Error as CoreError;

/// Failures of a command, rendered as `E:<module>:<code>:<detail>`.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or malformed input.
    #[error("{detail}")]
    Parse { module: &'static str, detail: String },
    #[error("{0}")]
    Io(String),
    /// The reader went away; not reported.
    #[error("broken pipe")]
    BrokenPipe,
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn parse(module: &'static str, detail: impl Into<String>) -> Self {
        CliError::Parse { module, detail: detail.into() }
    }

    pub fn module(&self) -> &'static str {
        match self {
            CliError::Parse { module, .. } => module,
            CliError::Io(_) | CliError::BrokenPipe => "cli",
            CliError::Core(e) => e.module(),
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Io(_) | CliError::BrokenPipe => "io",
            CliError::Core(e) => e.code(),
        }
    }

    /// 2 for bad input, 3 for violated preconditions, 4 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Io(_) | CliError::BrokenPipe => 2,
            CliError::Core(CoreError::InvalidNewform(_)) => 2,
            CliError::Core(e) if e.is_precondition() => 3,
            CliError::Core(_) => 4,
        }
    }

    pub fn line(&self) -> String {
        let detail = self.to_string().replace(['\n', '\r'], " ");
        format!("E:{}:{}:{}", self.module(), self.code(), detail)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            CliError::BrokenPipe
        } else {
            CliError::Io(e.to_string())
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(e) => e.into(),
            kind => CliError::Io(format!("{kind:?}")),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
