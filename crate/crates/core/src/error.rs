use thiserror::Error;

#[derive(Debug, Error)]
pub enum GzkError {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("field has wrong representation: expected {expected}, got {got}")]
    Representation { expected: &'static str, got: &'static str },

    #[error("parameter validation failed: {0}")]
    Validation(String),

    #[error("non-finite values encountered in {0}")]
    NonFinite(&'static str),

    #[error(
        "boundary-tail violation: fraction {fraction:.3e} of the L2 mass lies in the outer \
         10% shell of the box (limit {limit:.1e}); the R^2 -> box truncation is not justified"
    )]
    TailViolation { fraction: f64, limit: f64 },

    #[error("Picard iteration did not converge within {max_iter} iterations (last diff {last_diff:.3e}); the time horizon is likely too large")]
    NonConvergence { max_iter: usize, last_diff: f64 },

    #[error("time stepper instability: norm grew by factor {factor:.3e}")]
    Instability { factor: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, GzkError>;
