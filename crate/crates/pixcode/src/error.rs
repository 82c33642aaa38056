use std::path::Path;

use pixcode_core::Error as CoreError;

pub type Result<T> = std::result::Result<T, AppError>;

/// Exit status for failures of the inputs or the invocation.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for numerical failures.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: field `{field}`: {reason}")]
    Format {
        path: String,
        field: String,
        reason: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl AppError {
    pub fn format(path: &Path, field: impl Into<String>, reason: impl Into<String>) -> Self {
        AppError::Format {
            path: path.display().to_string(),
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AppError::Core(e) => e.kind(),
            AppError::Format { .. } => "FormatError",
            AppError::Io { .. } => "IoError",
            AppError::Usage(_) => "UsageError",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        }
    }

    /// One-line `key=value` rendering for the diagnostic stream.
    pub fn diagnostic(&self) -> String {
        let message = serde_json::to_string(&self.to_string()).unwrap_or_else(|_| "\"?\"".into());
        format!(
            "error kind={} exit={} message={}",
            self.kind(),
            self.exit_code(),
            message
        )
    }
}
