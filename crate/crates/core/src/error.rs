use thiserror::Error;

/// Errors raised by mesh handling, operator construction and time stepping.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mesh parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("mesh validation failed: {0}")]
    InvalidMesh(String),

    #[error("degenerate geometry: {0}")]
    Geometry(String),

    #[error("singular local system on {entity}")]
    SingularLocal { entity: String },

    #[error("linear solve failed at step {step}: {message}")]
    Solver { step: usize, message: String },

    #[error("Picard iteration did not converge at step {step} (t = {time}) after {iterations} iterations; increments: {history:?}")]
    NonConvergence { step: usize, time: f64, iterations: usize, history: Vec<f64> },

    #[error("step {step} (t = {time}) failed: {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
