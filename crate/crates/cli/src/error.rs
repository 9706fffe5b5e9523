use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_PARAMS: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{path}, line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Input data violating a structural requirement, e.g. a potential file
    /// that is not Hermitian.
    #[error("{path}: {message}")]
    BadInput { path: PathBuf, message: String },

    #[error("inadmissible parameters: {0}")]
    Params(String),

    #[error(transparent)]
    Library(#[from] dirac_reduce::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use dirac_reduce::Error as E;
        match self {
            CliError::Read { .. }
            | CliError::Write { .. }
            | CliError::Config { .. }
            | CliError::Parse { .. }
            | CliError::BadInput { .. } => EXIT_IO,
            CliError::Params(_) => EXIT_PARAMS,
            CliError::Library(e) => match e {
                E::InvalidParameter(_)
                | E::NotAdmissible(_)
                | E::ZeroEnergyMode
                | E::DegenerateAngle(_)
                | E::SchemeMismatch(_)
                | E::TooFewGrids(_) => EXIT_PARAMS,
                E::NotHermitian { .. } | E::DimensionMismatch { .. } => EXIT_IO,
                E::UnderdeterminedAngle | E::NotReducible { .. } | E::Eigensolver(_) => EXIT_VERIFY,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
