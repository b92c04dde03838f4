use thiserror::Error;

/// Everything that stops a command before it produces a verdict or output.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{context}: {message}")]
    Input { context: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] confsym::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn input(context: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Input {
            context: context.into(),
            message: message.into(),
        }
    }

    /// Prefixes the context of an input error.
    pub fn within(self, outer: &str) -> Self {
        match self {
            CliError::Input { context, message } => CliError::Input {
                context: format!("{outer}: {context}"),
                message,
            },
            other => other,
        }
    }
}
