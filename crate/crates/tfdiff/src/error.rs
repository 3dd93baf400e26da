use thiserror::Error;

/// Errors produced by mesh construction, assembly, time stepping and the CLI driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("validation failed: {2} (field `{0}`, observed {1})")]
    Violation(String, f64, String),

    #[error("coercivity violated: diffusion coefficient is {value} at x = {x}")]
    Coercivity { x: f64, value: f64 },

    #[error("singular system: nonpositive pivot {pivot} at row {row}")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("solver failure at time step {step}: {source}")]
    StepFailure {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("estimator quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("exact solution required but not configured: {0}")]
    MissingExactSolution(String),

    #[error("theta too small for this alpha: cos(phi) = {cos_phi} <= 0")]
    ThetaTooSmall { cos_phi: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    ConfigParse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
