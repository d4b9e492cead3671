//! CLI failures and their exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid scenario configuration.
    #[error("{0}")]
    Config(String),
    /// An engine could not produce a result.
    #[error("{0}")]
    Engine(String),
    /// Results were produced but a configured tolerance failed.
    #[error("{0}")]
    Tolerance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Tolerance(_) => 1,
            CliError::Config(_) => 2,
            CliError::Engine(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Tolerance(_) => "tolerance",
            CliError::Config(_) => "config",
            CliError::Engine(_) => "engine",
        }
    }

    /// One line, `key=value` fields, suitable for scripts reading stderr.
    pub fn reason_line(&self, scenario: &str) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ").replace('"', "'");
        format!("fpe-sim: error={} scenario={} message=\"{msg}\"", self.kind(), scenario)
    }
}

impl From<fpe_core::Error> for CliError {
    fn from(e: fpe_core::Error) -> Self {
        match e {
            fpe_core::Error::Config(m) => CliError::Config(m),
            other => CliError::Engine(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Engine(format!("i/o: {e}"))
    }
}
