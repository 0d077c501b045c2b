use thiserror::Error;

/// CLI failure, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::InsufficientData(_) => 4,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<xz_dressing::Error> for CliError {
    fn from(e: xz_dressing::Error) -> Self {
        use xz_dressing::Error as E;
        match e {
            E::InvalidParameter { .. } => CliError::Config(e.to_string()),
            E::InsufficientData(_) => CliError::InsufficientData(e.to_string()),
            E::DegenerateField { .. } | E::ExactCrossing { .. } | E::IntegrationFailure { .. } => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config(String::new()).exit_code(), 2);
        assert_eq!(CliError::Numerical(String::new()).exit_code(), 3);
        assert_eq!(CliError::InsufficientData(String::new()).exit_code(), 4);
        let e: CliError = xz_dressing::Error::ExactCrossing { min_field: 0.0 }.into();
        assert_eq!(e.exit_code(), 3);
        let e: CliError = xz_dressing::Error::InsufficientData("x".into()).into();
        assert_eq!(e.exit_code(), 4);
    }
}
