use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl From<qbw_core::Error> for CliError {
    fn from(e: qbw_core::Error) -> Self {
        match e {
            qbw_core::Error::NonConvergence(msg) => CliError::Numerical(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(qbw_core::Error::NonConvergence("x".into())).exit_code(), 3);
        assert_eq!(CliError::from(qbw_core::Error::Domain("x".into())).exit_code(), 2);
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
    }
}
