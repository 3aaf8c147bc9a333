//! Failure classes of a CLI run and their exit codes.

use hardedge_core::NumError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed flags or an unreadable configuration document.
    #[error("usage: {0}")]
    Usage(String),
    /// A parameter violates a configuration invariant or a check fails its bound.
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Numeric(#[from] NumError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// 1 usage, 2 validation, 3 numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Validation(_) => 2,
            CliError::Numeric(e) => match e {
                NumError::NonConvergence(_)
                | NumError::ContourNonConvergence(_)
                | NumError::PrecisionLoss(_)
                | NumError::NonFinite(_)
                | NumError::SingularMoment { .. }
                | NumError::FitFailure(_) => 3,
                _ => 2,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_class() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::Validation("x".into()).exit_code(), 2);
        assert_eq!(
            CliError::from(NumError::InvalidParameter("θ".into())).exit_code(),
            2
        );
        assert_eq!(
            CliError::from(NumError::NonConvergence("q".into())).exit_code(),
            3
        );
        assert_eq!(
            CliError::from(NumError::SingularMoment { degree: 3 }).exit_code(),
            3
        );
    }
}
