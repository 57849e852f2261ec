use std::fmt;
use std::process::ExitCode;

/// Failure categories of the command line, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Mesh(String),
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Mesh(_) => 4,
            CliError::Solver(_) => 5,
        })
    }

    pub fn io(context: impl fmt::Display, err: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Mesh(m) => write!(f, "mesh error: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
        }
    }
}

impl From<mhdvem::Error> for CliError {
    fn from(e: mhdvem::Error) -> Self {
        use mhdvem::Error as E;
        match e {
            E::InvalidArgument(m) => CliError::Config(m),
            E::Io(io) => CliError::Io(io.to_string()),
            e @ (E::Parse { .. } | E::InvalidMesh(_) | E::Geometry(_) | E::SingularLocal { .. }) => {
                CliError::Mesh(e.to_string())
            }
            e @ (E::Solver { .. } | E::NonConvergence { .. } | E::Step { .. }) => CliError::Solver(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
