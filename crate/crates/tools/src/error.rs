use std::path::PathBuf;

pub type ToolResult<T> = Result<T, ToolError>;

#[derive(Debug, thiserror::Error)]
pub enum ToolError {
    #[error(transparent)]
    Core(#[from] bellpoly_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("io: {0}")]
    Stream(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{file}:{line}: {message}")]
    Format { file: String, line: usize, message: String },
    #[error("usage: {0}")]
    Usage(String),
}

impl ToolError {
    pub fn format(file: &str, line: usize, message: impl Into<String>) -> Self {
        Self::Format { file: file.to_string(), line, message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }
}
