use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A chart was evaluated at a point where it degenerates (e.g. a pole).
    #[error("degenerate chart point: {0}")]
    Domain(String),

    /// The metric computed from a chart is not positive definite.
    #[error("chart degeneracy (mesh folding) at xi = ({xi1}, {xi2}): {reason}")]
    ChartDegenerate { xi1: f64, xi2: f64, reason: String },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    /// The requested time-like direction is characteristic (eigenvalue denominator vanishes).
    #[error("degenerate time-like direction: {0}")]
    DegenerateDirection(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("solver failure at cell {cell} (i = {i}, j = {j}): {reason}")]
    SolverFailure {
        cell: usize,
        i: usize,
        j: usize,
        reason: String,
    },

    #[error("divergence at iteration {iteration}: relative residual {relative:e}")]
    Divergence { iteration: usize, relative: f64 },

    #[error("no attached conical shock: {0}")]
    NoAttachedSolution(String),

    #[error("verification failure: {0}")]
    Verification(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed field file: {0}")]
    FieldFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
