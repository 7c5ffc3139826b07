use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("log-gamma pole at non-positive integer {0}")]
    Pole(f64),
    #[error("hypergeometric series does not converge (|z| = {0})")]
    NoConvergence(f64),
    #[error("parameter pole in hypergeometric series at term {0}")]
    ParameterPole(usize),
    #[error("non-finite value at x = {0}")]
    NonFinite(f64),
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("chart coordinates outside domain: {0}")]
    OutOfDomain(String),
    #[error("singular configuration: {0}")]
    Singular(String),
    #[error("no bound state: {0}")]
    NoBoundState(String),
    #[error("boundary state at E = 1/8 is excluded")]
    BoundaryState,
    #[error("quantum number out of window: {0}")]
    OutOfWindow(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("root solver failed: {msg} (best residual {best_residual:e})")]
    SolverFailure { msg: String, best_residual: f64 },
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("branch cut crossing: {0}")]
    BranchCut(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
