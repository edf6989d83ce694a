use thiserror::Error;

/// Failures of a command, split by exit code: input problems exit with 2,
/// mathematical checks that fail exit with 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("line {line}, column {col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Failed {
        context: String,
        source: Box<alexsheaf::Error>,
    },
}

impl CliError {
    pub fn parse(line: usize, col: usize, message: impl Into<String>) -> Self {
        CliError::Parse {
            line,
            col,
            message: message.into(),
        }
    }

    pub fn failed(context: impl Into<String>, source: alexsheaf::Error) -> Self {
        CliError::Failed {
            context: context.into(),
            source: Box::new(source),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed { .. } => 1,
            CliError::Parse { .. } | CliError::Usage(_) => 2,
        }
    }

    pub fn location(&self) -> Option<(usize, usize)> {
        match self {
            CliError::Parse { line, col, .. } => Some((*line, *col)),
            _ => None,
        }
    }
}
