use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Lib(#[from] alphagan::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn kind(&self) -> &'static str {
        use alphagan::Error as E;
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Lib(e) => match e {
                E::Domain(_) => "domain",
                E::Quadrature { .. } => "quadrature",
                E::Precondition(_) => "precondition",
                E::Shape(_) => "shape",
                E::Config(_) => "config",
                E::Unsupported(_) => "unsupported",
                E::Snapshot(_) => "snapshot",
                E::Io(_) => "io",
            },
        }
    }

    /// 2 for invalid input, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "io" | "quadrature" | "snapshot" => 1,
            _ => 2,
        }
    }

    /// Single-line JSON for standard error.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}
