use std::fmt;

use ergseries_core::{Error, ErrorKind};

/// Failure class, mapped onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Io,
    Schema,
    Numerical,
    Precision,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Io => 1,
            ErrorClass::Schema => 2,
            ErrorClass::Numerical => 3,
            ErrorClass::Precision => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorClass::Io => "io",
            ErrorClass::Schema => "schema",
            ErrorClass::Numerical => "numerical",
            ErrorClass::Precision => "precision",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct AppError {
    pub class: ErrorClass,
    pub message: String,
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.class.name(), self.message)
    }
}

impl AppError {
    pub fn schema(message: impl Into<String>) -> Self {
        AppError { class: ErrorClass::Schema, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        AppError { class: ErrorClass::Io, message: message.into() }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.class.name(), "message": self.message }).to_string()
    }
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        let class = match e.kind() {
            ErrorKind::Invalid => ErrorClass::Schema,
            ErrorKind::Numerical => ErrorClass::Numerical,
            ErrorKind::Precision => ErrorClass::Precision,
        };
        AppError { class, message: e.to_string() }
    }
}

impl From<serde_json::Error> for AppError {
    fn from(e: serde_json::Error) -> Self {
        AppError::schema(e.to_string())
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::io(e.to_string())
    }
}
