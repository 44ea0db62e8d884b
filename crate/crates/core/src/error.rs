use thiserror::Error;

/// Errors produced by the numerical kernels and the scenario runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("interpolation outside table: {0}")]
    Interpolation(String),
    #[error("integrator failed to converge: {0}")]
    Convergence(String),
    #[error("singular configuration: {0}")]
    Singular(String),
    #[error("root bracketing failed: {0}")]
    Root(String),
    #[error("grid resolution guard violated: {0}")]
    Resolution(String),
    #[error("spectral truncation guard violated: {0}")]
    Truncation(String),
    #[error("series tail not decayed: {0}")]
    Tail(String),
    #[error("CFL condition violated: {0}")]
    Cfl(String),
    #[error("wave support reached the grid boundary: {0}")]
    BoundaryTouch(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
