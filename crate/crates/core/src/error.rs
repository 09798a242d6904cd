use thiserror::Error;

/// Errors surfaced by the workbench.
///
/// `CapExceeded` is deliberately separate from `InvalidInput`: callers (the
/// CLI, the verification suites) treat a cap refusal as "too big to compute
/// honestly", not as a malformed request, and map it to its own exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{what} of order {order} exceeds the {cap_name} cap {cap}{hint}")]
    CapExceeded {
        what: String,
        order: usize,
        cap_name: String,
        cap: usize,
        hint: String,
    },

    #[error("subgroup not normal: {0}")]
    NotNormal(String),

    #[error("inconsistent generator images: {0}")]
    InconsistentImages(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn cap(what: impl Into<String>, order: usize, cap_name: &str, cap: usize) -> Self {
        Error::CapExceeded {
            what: what.into(),
            order,
            cap_name: cap_name.to_string(),
            cap,
            hint: String::new(),
        }
    }

    pub fn cap_with_hint(
        what: impl Into<String>,
        order: usize,
        cap_name: &str,
        cap: usize,
        hint: impl Into<String>,
    ) -> Self {
        Error::CapExceeded {
            what: what.into(),
            order,
            cap_name: cap_name.to_string(),
            cap,
            hint: format!("; {}", hint.into()),
        }
    }

    /// Exit code contract used by the CLI: 2 = input error, 3 = cap refusal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } => 3,
            _ => 2,
        }
    }
}
